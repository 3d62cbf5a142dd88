#include "ecgemd/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "ecgemd/dataset.hpp"
#include "ecgemd/error.hpp"
#include "ecgemd/parallel.hpp"
#include "ecgemd/report.hpp"
#include "ecgemd/sample_io.hpp"
#include "json.hpp"

#ifndef ECGEMD_VERSION
#define ECGEMD_VERSION "0.0.0"
#endif

namespace ecgemd {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr std::string_view kRecordIndexSchema = "# ecgemd-records v1";
constexpr std::string_view kSegmentIndexSchema = "# ecgemd-segments v1";
constexpr int kStageManifestVersion = 1;

// ---------------------------------------------------------------------------
// Config (de)serialisation

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, _] : obj.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown config key '" + where + "." + key + "'");
        }
    }
}

template <typename T>
void read_key(const json& obj, const char* key, T& out) {
    if (auto it = obj.find(key); it != obj.end()) out = it->get<T>();
}

template <typename T>
void read_optional(const json& obj, const char* key, std::optional<T>& out) {
    if (auto it = obj.find(key); it != obj.end()) {
        if (it->is_null()) {
            out.reset();
        } else {
            out = it->get<T>();
        }
    }
}

std::string_view to_string(EnvelopeBoundary b) { return b == EnvelopeBoundary::kMirror ? "mirror" : "none"; }
std::string_view to_string(SplineEnd e) { return e == SplineEnd::kNotAKnot ? "not-a-knot" : "natural"; }

EnvelopeBoundary parse_boundary(const std::string& s) {
    if (s == "mirror") return EnvelopeBoundary::kMirror;
    if (s == "none") return EnvelopeBoundary::kNone;
    throw ConfigError("emd.envelope_boundary must be 'mirror' or 'none'");
}

SplineEnd parse_spline(const std::string& s) {
    if (s == "not-a-knot") return SplineEnd::kNotAKnot;
    if (s == "natural") return SplineEnd::kNatural;
    throw ConfigError("emd.spline must be 'not-a-knot' or 'natural'");
}

json optional_json(const auto& opt) { return opt ? json(*opt) : json(nullptr); }

json denoise_json(const DenoiseConfig& c) {
    return {{"wavelet", c.wavelet}, {"levels", c.levels}, {"rule", std::string(to_string(c.rule))},
            {"per_level_sigma", c.per_level_sigma}};
}

json segment_json(const SegmentationConfig& c) { return {{"segment_len", c.segment_len}}; }

json emd_json(const EmdConfig& c) {
    return {{"num_imfs", c.num_imfs},
            {"sd_stop", c.sd_stop},
            {"max_sift_iters", c.max_sift_iters},
            {"envelope_boundary", std::string(to_string(c.envelope_boundary))},
            {"spline", std::string(to_string(c.spline_end))},
            {"symmetry_tolerance", c.symmetry_tolerance},
            {"strict_crossing_rule", c.strict_crossing_rule}};
}

json features_json(const FeatureConfig& c) {
    return {{"entropy_threshold_eps", c.entropy_threshold_eps}, {"norm_p", c.norm_p},
            {"apen_m", c.apen_m},
            {"apen_r_factor", c.apen_r_factor},
            {"apen_max_samples", optional_json(c.apen_max_samples)},
            {"sure_enabled", c.sure_enabled}};
}

json tree_json(const TreeConfig& c) {
    return {{"max_depth", optional_json(c.max_depth)},
            {"min_samples_split", c.min_samples_split},
            {"min_samples_leaf", c.min_samples_leaf},
            {"impurity", "gini"}};
}

json eval_json(const EvalConfig& c) {
    return {{"k_folds", c.k_folds}, {"shuffle_seed", c.shuffle_seed}, {"stratified", c.stratified}};
}

// ---------------------------------------------------------------------------
// Stage bookkeeping

fs::path stage_manifest_path(const PipelineConfig& config, Stage stage) { return stage_dir(config, stage) / "stage.json"; }

std::optional<json> read_stage_manifest(const PipelineConfig& config, Stage stage) {
    const auto path = stage_manifest_path(config, stage);
    if (!fs::exists(path)) return std::nullopt;
    try {
        return json::parse(read_text_file(path));
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

// Upstream stage manifest; its output checksums feed the downstream fingerprint.
json require_upstream(const PipelineConfig& config, Stage upstream, Stage requested) {
    auto manifest = read_stage_manifest(config, upstream);
    if (!manifest) {
        throw ConfigError("stage '" + std::string(to_string(requested)) + "' needs the '" +
                          std::string(to_string(upstream)) + "' artifacts, but " +
                          stage_manifest_path(config, upstream).string() + " is missing (run '" +
                          std::string(to_string(upstream)) + "' first)");
    }
    for (const auto& [rel, _] : manifest->at("outputs").items()) {
        const auto file = stage_dir(config, upstream) / rel;
        if (!fs::exists(file)) {
            throw ConfigError("stage '" + std::string(to_string(requested)) + "': missing upstream artifact " +
                              file.string() + " (re-run '" + std::string(to_string(upstream)) + "')");
        }
    }
    return *manifest;
}

bool outputs_intact(const PipelineConfig& config, Stage stage, const json& manifest) {
    for (const auto& [rel, sum] : manifest.at("outputs").items()) {
        const auto file = stage_dir(config, stage) / rel;
        if (!fs::exists(file) || sha256_file(file) != sum.get<std::string>()) return false;
    }
    return true;
}

std::optional<StageResult> cached_result(const PipelineConfig& config, Stage stage, const std::string& fingerprint) {
    const auto manifest = read_stage_manifest(config, stage);
    if (!manifest || manifest->value("fingerprint", "") != fingerprint) return std::nullopt;
    if (!outputs_intact(config, stage, *manifest)) return std::nullopt;
    StageResult r{stage, true, 0.0, {}};
    for (const auto& [rel, _] : manifest->at("outputs").items()) r.outputs.push_back(rel);
    return r;
}

StageResult finish_stage(const PipelineConfig& config, Stage stage, const std::string& fingerprint,
                         const std::vector<std::string>& outputs, json extra, double seconds) {
    json manifest;
    manifest["schema"] = "ecgemd-stage v" + std::to_string(kStageManifestVersion);
    manifest["stage"] = std::string(to_string(stage));
    manifest["tool_version"] = std::string(tool_version());
    manifest["fingerprint"] = fingerprint;
    manifest["seconds"] = seconds;
    manifest["extra"] = std::move(extra);
    json sums = json::object();
    for (const auto& rel : outputs) sums[rel] = sha256_file(stage_dir(config, stage) / rel);
    manifest["outputs"] = std::move(sums);
    write_file_atomic(stage_manifest_path(config, stage), manifest.dump(1) + "\n");
    return {stage, false, seconds, outputs};
}

std::string fingerprint_of(const json& inputs) { return sha256_hex(inputs.dump()); }

// ---------------------------------------------------------------------------
// Record / segment index files

struct RecordRow {
    std::string id;
    ClassLabel label = ClassLabel::kNormal;
    std::size_t length = 0;
    std::string file;  ///< relative to the stage directory
};

std::string record_index_text(const std::vector<RecordRow>& rows) {
    std::ostringstream out;
    out << kRecordIndexSchema << "\nid,label,length,file\n";
    for (const auto& r : rows) out << r.id << ',' << to_string(r.label) << ',' << r.length << ',' << r.file << '\n';
    return out.str();
}

std::size_t parse_size(std::string_view s, const std::string& where) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw DataError(where + ": bad integer '" + std::string(s) + "'");
    return v;
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (!line.empty() && line.back() == ',') cols.emplace_back();
    return cols;
}

std::vector<RecordRow> read_record_index(const fs::path& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line != kRecordIndexSchema) throw DataError(path.string() + ": bad schema line");
    std::getline(in, line);
    std::vector<RecordRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cols = split_commas(line);
        if (cols.size() != 4) throw DataError(path.string() + ": malformed row '" + line + "'");
        rows.push_back({cols[0], parse_label(cols[1]), parse_size(cols[2], path.string()), cols[3]});
    }
    return rows;
}

struct SegmentRow {
    std::string record_id;
    ClassLabel label = ClassLabel::kNormal;
    std::size_t offset = 0;
    std::size_t length = 0;
    std::string file;  ///< relative to out_dir
};

std::vector<SegmentRow> read_segment_index(const fs::path& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line != kSegmentIndexSchema) throw DataError(path.string() + ": bad schema line");
    std::getline(in, line);
    std::vector<SegmentRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cols = split_commas(line);
        if (cols.size() != 5) throw DataError(path.string() + ": malformed row '" + line + "'");
        rows.push_back({cols[0], parse_label(cols[1]), parse_size(cols[2], path.string()),
                        parse_size(cols[3], path.string()), cols[4]});
    }
    return rows;
}

std::string record_file_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "records/r%06zu.bin", index);
    return buf;
}

std::vector<FeatureVector> read_features(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path.string() + ": cannot open features table");
    return read_feature_table(in);
}

TrainingSet to_training_set(const std::vector<FeatureVector>& rows) {
    TrainingSet set(kFeatureCount);
    for (const auto& r : rows) set.add_row(r.values, r.label);
    return set;
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// Stages

StageResult run_ingest(const PipelineConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    if (config.manifest.empty()) throw ConfigError("no dataset manifest configured");
    if (!fs::exists(config.manifest)) throw ConfigError("manifest " + config.manifest.string() + " does not exist");
    auto manifest = load_manifest(config.manifest);
    std::sort(manifest.entries.begin(), manifest.entries.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.id < b.id; });

    json inputs;
    inputs["stage"] = "ingest";
    inputs["manifest"] = sha256_file(config.manifest);
    json files = json::array();
    for (const auto& e : manifest.entries) files.push_back({e.id, sha256_file(e.path)});
    inputs["records"] = std::move(files);
    const auto fingerprint = fingerprint_of(inputs);
    if (auto cached = cached_result(config, Stage::kIngest, fingerprint)) return *cached;

    const auto dir = stage_dir(config, Stage::kIngest);
    fs::remove_all(dir);
    std::vector<RecordRow> rows(manifest.entries.size());
    parallel_for(manifest.entries.size(), config.workers, [&](std::size_t i) {
        const auto& entry = manifest.entries[i];
        auto record = trim_prefix(load_record(entry), trim_for(entry.label, manifest));
        rows[i] = {record.id, record.label, record.samples.size(), record_file_name(i)};
        write_sample_file(dir / rows[i].file, record.samples);
    });
    write_file_atomic(dir / "records.csv", record_index_text(rows));

    std::vector<std::string> outputs{"records.csv"};
    std::size_t hpt = 0;
    for (const auto& r : rows) {
        outputs.push_back(r.file);
        hpt += r.label == ClassLabel::kHpt ? 1 : 0;
    }
    json extra = {{"records", rows.size()},
                  {"records_hpt", hpt},
                  {"records_normal", rows.size() - hpt},
                  {"trim_prefix_hpt", manifest.trim_prefix_hpt}};
    return finish_stage(config, Stage::kIngest, fingerprint, outputs, std::move(extra), elapsed_since(start));
}

StageResult run_denoise(const PipelineConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const auto upstream = require_upstream(config, Stage::kIngest, Stage::kDenoise);
    const auto fingerprint = fingerprint_of({{"stage", "denoise"},
                                             {"config", denoise_json(config.denoise)},
                                             {"ingest", upstream.at("outputs")}});
    if (auto cached = cached_result(config, Stage::kDenoise, fingerprint)) return *cached;

    const auto in_dir = stage_dir(config, Stage::kIngest);
    const auto dir = stage_dir(config, Stage::kDenoise);
    fs::remove_all(dir);
    auto rows = read_record_index(in_dir / "records.csv");
    parallel_for(rows.size(), config.workers, [&](std::size_t i) {
        const auto samples = read_sample_file(in_dir / rows[i].file);
        write_sample_file(dir / rows[i].file, denoise(samples, config.denoise));
    });
    write_file_atomic(dir / "records.csv", record_index_text(rows));
    std::vector<std::string> outputs{"records.csv"};
    for (const auto& r : rows) outputs.push_back(r.file);
    return finish_stage(config, Stage::kDenoise, fingerprint, outputs, json::object(), elapsed_since(start));
}

StageResult run_segment(const PipelineConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const auto upstream = require_upstream(config, Stage::kDenoise, Stage::kSegment);
    const auto fingerprint = fingerprint_of({{"stage", "segment"},
                                             {"config", segment_json(config.segmentation)},
                                             {"denoise", upstream.at("outputs")}});
    if (auto cached = cached_result(config, Stage::kSegment, fingerprint)) return *cached;

    const auto dir = stage_dir(config, Stage::kSegment);
    fs::remove_all(dir);
    const auto rows = read_record_index(stage_dir(config, Stage::kDenoise) / "records.csv");
    std::ostringstream out;
    out << kSegmentIndexSchema << "\nrecord_id,label,offset,length,file\n";
    SegmentCounts counts;
    for (const auto& r : rows) {
        if (r.length == 0) throw DataError("record '" + r.id + "' is empty after trimming; nothing to segment");
        const auto file = (fs::path(to_string(Stage::kDenoise)) / r.file).generic_string();
        for (const auto offset : segment_offsets(r.length, config.segmentation)) {
            out << r.id << ',' << to_string(r.label) << ',' << offset << ',' << config.segmentation.segment_len << ','
                << file << '\n';
            ++(r.label == ClassLabel::kHpt ? counts.hpt : counts.normal);
        }
    }
    write_file_atomic(dir / "segments.csv", out.str());
    json extra = {{"segment_len", config.segmentation.segment_len},
                  {"counts", {{"HPT", counts.hpt}, {"Normal", counts.normal}}}};
    return finish_stage(config, Stage::kSegment, fingerprint, {"segments.csv"}, std::move(extra), elapsed_since(start));
}

StageResult run_features(const PipelineConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const auto segments = require_upstream(config, Stage::kSegment, Stage::kFeatures);
    const auto denoised = require_upstream(config, Stage::kDenoise, Stage::kFeatures);
    const auto fingerprint = fingerprint_of({{"stage", "features"},
                                             {"emd", emd_json(config.emd)},
                                             {"features", features_json(config.features)},
                                             {"segment", segments.at("outputs")},
                                             {"denoise", denoised.at("outputs")}});
    if (auto cached = cached_result(config, Stage::kFeatures, fingerprint)) return *cached;

    const auto dir = stage_dir(config, Stage::kFeatures);
    fs::remove_all(dir);
    const auto rows = read_segment_index(stage_dir(config, Stage::kSegment) / "segments.csv");

    // Group segments by source file; each group is one unit of parallel work.
    std::vector<std::pair<std::size_t, std::size_t>> groups;  // [begin, end) into rows
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (groups.empty() || rows[groups.back().first].file != rows[i].file) groups.emplace_back(i, i);
        groups.back().second = i + 1;
    }
    std::vector<FeatureVector> features(rows.size());
    std::vector<std::size_t> incomplete(groups.size(), 0);
    parallel_for(groups.size(), config.workers, [&](std::size_t g) {
        const auto [begin, end] = groups[g];
        const auto samples = read_sample_file(config.out_dir / rows[begin].file);
        for (std::size_t i = begin; i < end; ++i) {
            const auto& row = rows[i];
            if (row.offset + row.length > samples.size()) {
                throw DataError("segment " + row.record_id + "@" + std::to_string(row.offset) + " exceeds its record");
            }
            const std::span<const double> window(samples.data() + row.offset, row.length);
            const auto dec = emd_decompose(window, config.emd);
            incomplete[g] += dec.incomplete() ? 1 : 0;
            auto fv = extract_features(dec, config.features);
            fv.record_id = row.record_id;
            fv.offset = row.offset;
            fv.label = row.label;
            features[i] = std::move(fv);
        }
    });
    std::sort(features.begin(), features.end(), [](const FeatureVector& a, const FeatureVector& b) {
        return std::tie(a.record_id, a.offset) < std::tie(b.record_id, b.offset);
    });
    std::ostringstream out;
    write_feature_table(out, features);
    write_file_atomic(dir / "features.csv", out.str());
    std::size_t total_incomplete = 0;
    for (const auto n : incomplete) total_incomplete += n;
    json extra = {{"rows", features.size()}, {"incomplete_decompositions", total_incomplete}};
    return finish_stage(config, Stage::kFeatures, fingerprint, {"features.csv"}, std::move(extra), elapsed_since(start));
}

StageResult run_train(const PipelineConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const auto upstream = require_upstream(config, Stage::kFeatures, Stage::kTrain);
    const auto fingerprint = fingerprint_of(
        {{"stage", "train"}, {"tree", tree_json(config.tree)}, {"features", upstream.at("outputs")}});
    if (auto cached = cached_result(config, Stage::kTrain, fingerprint)) return *cached;

    const auto dir = stage_dir(config, Stage::kTrain);
    fs::remove_all(dir);
    const auto rows = read_features(stage_dir(config, Stage::kFeatures) / "features.csv");
    const auto model = fit_tree(to_training_set(rows), config.tree);
    std::ostringstream out;
    save_tree(out, model);
    write_file_atomic(dir / "model.json", out.str());
    json extra = {{"nodes", model.nodes().size()}, {"depth", model.depth()}, {"leaves", model.leaf_count()}};
    return finish_stage(config, Stage::kTrain, fingerprint, {"model.json"}, std::move(extra), elapsed_since(start));
}

RunReport assemble_report(const PipelineConfig& config, const std::vector<StageResult>* results) {
    RunReport report;
    report.tool_version = std::string(tool_version());
    report.config_snapshot = config_snapshot(config);
    report.segment_len = config.segmentation.segment_len;
    if (const auto seg = read_stage_manifest(config, Stage::kSegment)) {
        const auto& counts = seg->at("extra").at("counts");
        report.segment_counts = {counts.at("HPT").get<std::size_t>(), counts.at("Normal").get<std::size_t>()};
    }
    for (const auto stage : kAllStages) {
        if (results) {
            const auto it = std::find_if(results->begin(), results->end(),
                                         [&](const StageResult& r) { return r.stage == stage; });
            if (it != results->end()) report.stages.push_back({std::string(to_string(stage)), it->seconds, it->cached});
        } else if (const auto m = read_stage_manifest(config, stage)) {
            report.stages.push_back({std::string(to_string(stage)), m->value("seconds", 0.0), false});
        }
    }
    const auto metrics_doc = json::parse(read_text_file(stage_dir(config, Stage::kEvaluate) / "metrics.json"));
    auto read_cm = [](const json& j) {
        return ConfusionMatrix{j.at("tp").get<std::uint64_t>(), j.at("fn").get<std::uint64_t>(),
                               j.at("tn").get<std::uint64_t>(), j.at("fp").get<std::uint64_t>()};
    };
    report.pooled = read_cm(metrics_doc.at("pooled"));
    for (const auto& f : metrics_doc.at("per_fold")) report.per_fold.push_back(read_cm(f));
    report.metrics = metrics(report.pooled);
    return report;
}

void write_report(const PipelineConfig& config, const std::vector<StageResult>* results) {
    write_file_atomic(report_path(config), to_json(assemble_report(config, results)));
}

StageResult run_evaluate(const PipelineConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const auto upstream = require_upstream(config, Stage::kFeatures, Stage::kEvaluate);
    const auto fingerprint = fingerprint_of({{"stage", "evaluate"},
                                             {"tree", tree_json(config.tree)},
                                             {"eval", eval_json(config.eval)},
                                             {"features", upstream.at("outputs")}});
    auto cached = cached_result(config, Stage::kEvaluate, fingerprint);
    if (cached) {
        if (!fs::exists(report_path(config))) write_report(config, nullptr);
        return *cached;
    }

    const auto dir = stage_dir(config, Stage::kEvaluate);
    fs::remove_all(dir);
    const auto rows = read_features(stage_dir(config, Stage::kFeatures) / "features.csv");
    auto eval_config = config.eval;
    eval_config.workers = config.workers;
    const auto cv = cross_validate(to_training_set(rows), config.tree, eval_config);

    write_file_atomic(dir / "metrics.json", metrics_json(cv.pooled, cv.per_fold, cv.metrics));
    write_file_atomic(dir / "metrics.txt",
                      metrics_table(cv.metrics, std::to_string(config.segmentation.segment_len) + " length"));
    write_file_atomic(dir / "confusion.txt", confusion_table(cv.pooled));

    std::vector<std::size_t> fold_of(rows.size());
    for (std::size_t f = 0; f < cv.folds.size(); ++f) {
        for (const auto i : cv.folds[f]) fold_of[i] = f;
    }
    std::ostringstream folds;
    folds << "# ecgemd-folds v1\nrecord_id,offset,label,fold,predicted\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        folds << rows[i].record_id << ',' << rows[i].offset << ',' << to_string(rows[i].label) << ',' << fold_of[i]
              << ',' << to_string(cv.predictions[i]) << '\n';
    }
    write_file_atomic(dir / "folds.csv", folds.str());

    auto result = finish_stage(config, Stage::kEvaluate, fingerprint,
                               {"metrics.json", "metrics.txt", "confusion.txt", "folds.csv"}, json::object(),
                               elapsed_since(start));
    write_report(config, nullptr);
    return result;
}

}  // namespace

std::string_view tool_version() noexcept { return ECGEMD_VERSION; }

void validate(const PipelineConfig& config) {
    if (config.workers < 1) throw ConfigError("workers must be >= 1");
    if (config.denoise.levels < 1) throw ConfigError("denoise levels must be >= 1");
    daubechies_lowpass(config.denoise.wavelet);
    if (config.segmentation.segment_len < 1) throw ConfigError("segment_len must be >= 1");
    if (config.segmentation.segment_len < kMinEmdLength) {
        throw ConfigError("segment_len must be >= " + std::to_string(kMinEmdLength) + " for EMD");
    }
    validate(config.emd);
    if (config.emd.num_imfs != static_cast<int>(kFeatureImfs)) {
        throw ConfigError("emd.num_imfs must be " + std::to_string(kFeatureImfs) + " (the feature vector is fixed at " +
                          std::to_string(kFeatureCount) + " columns)");
    }
    validate(config.features);
    validate(config.tree);
    if (config.eval.k_folds < 2) throw ConfigError("eval.k_folds must be >= 2");
}

PipelineConfig parse_pipeline_config(std::string_view json_text, const fs::path& base_dir) {
    PipelineConfig config;
    try {
        const auto doc = json::parse(json_text);
        reject_unknown(doc, {"manifest", "out", "workers", "denoise", "segment", "emd", "features", "tree", "eval"},
                       "config");
        if (auto it = doc.find("manifest"); it != doc.end()) {
            config.manifest = it->get<std::string>();
            if (config.manifest.is_relative()) config.manifest = base_dir / config.manifest;
        }
        if (auto it = doc.find("out"); it != doc.end()) {
            config.out_dir = it->get<std::string>();
            if (config.out_dir.is_relative()) config.out_dir = base_dir / config.out_dir;
        }
        read_key(doc, "workers", config.workers);
        if (auto it = doc.find("denoise"); it != doc.end()) {
            reject_unknown(*it, {"wavelet", "levels", "rule", "per_level_sigma"}, "denoise");
            read_key(*it, "wavelet", config.denoise.wavelet);
            read_key(*it, "levels", config.denoise.levels);
            if (it->contains("rule")) config.denoise.rule = parse_threshold_rule(it->at("rule").get<std::string>());
            read_key(*it, "per_level_sigma", config.denoise.per_level_sigma);
        }
        if (auto it = doc.find("segment"); it != doc.end()) {
            reject_unknown(*it, {"segment_len"}, "segment");
            read_key(*it, "segment_len", config.segmentation.segment_len);
        }
        if (auto it = doc.find("emd"); it != doc.end()) {
            reject_unknown(*it,
                           {"num_imfs", "sd_stop", "max_sift_iters", "envelope_boundary", "spline", "symmetry_tolerance",
                            "strict_crossing_rule"},
                           "emd");
            read_key(*it, "num_imfs", config.emd.num_imfs);
            read_key(*it, "sd_stop", config.emd.sd_stop);
            read_key(*it, "max_sift_iters", config.emd.max_sift_iters);
            if (it->contains("envelope_boundary")) {
                config.emd.envelope_boundary = parse_boundary(it->at("envelope_boundary").get<std::string>());
            }
            if (it->contains("spline")) config.emd.spline_end = parse_spline(it->at("spline").get<std::string>());
            read_key(*it, "symmetry_tolerance", config.emd.symmetry_tolerance);
            read_key(*it, "strict_crossing_rule", config.emd.strict_crossing_rule);
        }
        if (auto it = doc.find("features"); it != doc.end()) {
            reject_unknown(*it,
                           {"entropy_threshold_eps", "norm_p", "apen_m", "apen_r_factor", "apen_max_samples",
                            "sure_enabled"},
                           "features");
            read_key(*it, "entropy_threshold_eps", config.features.entropy_threshold_eps);
            read_key(*it, "norm_p", config.features.norm_p);
            read_key(*it, "apen_m", config.features.apen_m);
            read_key(*it, "apen_r_factor", config.features.apen_r_factor);
            read_optional(*it, "apen_max_samples", config.features.apen_max_samples);
            read_key(*it, "sure_enabled", config.features.sure_enabled);
        }
        if (auto it = doc.find("tree"); it != doc.end()) {
            reject_unknown(*it, {"max_depth", "min_samples_split", "min_samples_leaf", "impurity"}, "tree");
            read_optional(*it, "max_depth", config.tree.max_depth);
            read_key(*it, "min_samples_split", config.tree.min_samples_split);
            read_key(*it, "min_samples_leaf", config.tree.min_samples_leaf);
            if (it->contains("impurity") && it->at("impurity") != "gini") {
                throw ConfigError("tree.impurity must be 'gini'");
            }
        }
        if (auto it = doc.find("eval"); it != doc.end()) {
            reject_unknown(*it, {"k_folds", "shuffle_seed", "stratified"}, "eval");
            read_key(*it, "k_folds", config.eval.k_folds);
            read_key(*it, "shuffle_seed", config.eval.shuffle_seed);
            read_key(*it, "stratified", config.eval.stratified);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    validate(config);
    return config;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
    if (!fs::exists(path)) throw ConfigError("config file " + path.string() + " does not exist");
    return parse_pipeline_config(read_text_file(path), path.parent_path());
}

std::string config_snapshot(const PipelineConfig& config) {
    json doc = {{"manifest", config.manifest.generic_string()},
                {"out", config.out_dir.generic_string()},
                {"workers", config.workers},
                {"denoise", denoise_json(config.denoise)},
                {"segment", segment_json(config.segmentation)},
                {"emd", emd_json(config.emd)},
                {"features", features_json(config.features)},
                {"tree", tree_json(config.tree)},
                {"eval", eval_json(config.eval)}};
    return doc.dump(2);
}

std::string_view to_string(Stage stage) noexcept {
    switch (stage) {
        case Stage::kIngest: return "ingest";
        case Stage::kDenoise: return "denoise";
        case Stage::kSegment: return "segment";
        case Stage::kFeatures: return "features";
        case Stage::kTrain: return "train";
        case Stage::kEvaluate: return "evaluate";
    }
    return "?";
}

Stage parse_stage(std::string_view name) {
    for (const auto s : kAllStages) {
        if (to_string(s) == name) return s;
    }
    throw ConfigError("unknown stage '" + std::string(name) + "'");
}

fs::path stage_dir(const PipelineConfig& config, Stage stage) { return config.out_dir / std::string(to_string(stage)); }

fs::path report_path(const PipelineConfig& config) { return config.out_dir / "report.json"; }

StageResult run_stage(Stage stage, const PipelineConfig& config) {
    validate(config);
    switch (stage) {
        case Stage::kIngest: return run_ingest(config);
        case Stage::kDenoise: return run_denoise(config);
        case Stage::kSegment: return run_segment(config);
        case Stage::kFeatures: return run_features(config);
        case Stage::kTrain: return run_train(config);
        case Stage::kEvaluate: return run_evaluate(config);
    }
    throw InvariantError("unhandled stage");
}

std::vector<StageResult> run_all(const PipelineConfig& config) {
    std::vector<StageResult> results;
    for (const auto stage : kAllStages) results.push_back(run_stage(stage, config));
    write_report(config, &results);
    return results;
}

}  // namespace ecgemd
