#include "ecgemd/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ecgemd/error.hpp"
#include "ecgemd/sample_io.hpp"
#include "json.hpp"

namespace ecgemd {
namespace {

using nlohmann::json;

constexpr std::string_view kReportSchema = "ecgemd-report v1";
constexpr std::string_view kMetricsSchema = "ecgemd-metrics v1";
constexpr std::array<const char*, 5> kMetricNames = {"Acc", "Rec", "Spe", "Pre", "F1"};

std::array<std::optional<double>, 5> as_array(const MetricsReport& m) { return {m.acc, m.rec, m.spe, m.pre, m.f1}; }

json metric_value(const std::optional<double>& v) { return v ? json(*v) : json("n/a"); }

json cm_json(const ConfusionMatrix& cm) { return {{"tp", cm.tp}, {"fn", cm.fn}, {"tn", cm.tn}, {"fp", cm.fp}}; }

ConfusionMatrix cm_from(const json& j) {
    return {j.at("tp").get<std::uint64_t>(), j.at("fn").get<std::uint64_t>(), j.at("tn").get<std::uint64_t>(),
            j.at("fp").get<std::uint64_t>()};
}

json metrics_object(const MetricsReport& m) {
    return {{"acc", metric_value(m.acc)},
            {"rec", metric_value(m.rec)},
            {"spe", metric_value(m.spe)},
            {"pre", metric_value(m.pre)},
            {"f1", metric_value(m.f1)}};
}

std::optional<double> metric_from(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_string()) {
        if (v.get<std::string>() != "n/a") throw DataError(std::string("metric '") + key + "' has an invalid value");
        return std::nullopt;
    }
    return v.get<double>();
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string to_json(const RunReport& report) {
    json doc;
    doc["schema"] = kReportSchema;
    doc["tool_version"] = report.tool_version;
    doc["segment_len"] = report.segment_len;
    doc["segment_counts"] = {{"HPT", report.segment_counts.hpt}, {"Normal", report.segment_counts.normal}};
    json stages = json::array();
    for (const auto& s : report.stages) stages.push_back({{"stage", s.stage}, {"seconds", s.seconds}, {"cached", s.cached}});
    doc["stages"] = std::move(stages);
    doc["confusion"] = cm_json(report.pooled);
    json folds = json::array();
    for (const auto& f : report.per_fold) folds.push_back(cm_json(f));
    doc["per_fold"] = std::move(folds);
    doc["metrics"] = metrics_object(report.metrics);
    doc["config"] = report.config_snapshot.empty() ? json::object() : json::parse(report.config_snapshot);
    return doc.dump(2) + "\n";
}

RunReport parse_run_report(std::string_view json_text) {
    try {
        const auto doc = json::parse(json_text);
        if (doc.value("schema", "") != kReportSchema) throw DataError("not an ecgemd run report");
        if (!doc.contains("confusion") || !doc.contains("metrics")) {
            throw DataError("incomplete run report: missing confusion matrix or metrics");
        }
        RunReport r;
        r.tool_version = doc.value("tool_version", "");
        r.segment_len = doc.value("segment_len", std::size_t{0});
        if (doc.contains("segment_counts")) {
            r.segment_counts = {doc["segment_counts"].at("HPT").get<std::size_t>(),
                                doc["segment_counts"].at("Normal").get<std::size_t>()};
        }
        if (doc.contains("stages")) {
            for (const auto& s : doc["stages"]) {
                r.stages.push_back({s.at("stage").get<std::string>(), s.at("seconds").get<double>(),
                                    s.at("cached").get<bool>()});
            }
        }
        r.pooled = cm_from(doc.at("confusion"));
        if (doc.contains("per_fold")) {
            for (const auto& f : doc["per_fold"]) r.per_fold.push_back(cm_from(f));
        }
        const auto& m = doc.at("metrics");
        r.metrics = {metric_from(m, "acc"), metric_from(m, "rec"), metric_from(m, "spe"), metric_from(m, "pre"),
                     metric_from(m, "f1")};
        if (doc.contains("config")) r.config_snapshot = doc["config"].dump(2);
        return r;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed run report: ") + e.what());
    }
}

RunReport load_run_report(const std::filesystem::path& path) {
    try {
        return parse_run_report(read_text_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::string metrics_table(const MetricsReport& m, const std::string& row_label) {
    std::ostringstream out;
    out << pad_right("Decision Tree", 20);
    for (const auto* name : kMetricNames) out << pad(std::string(name) + " (%)", 12);
    out << '\n' << pad_right(row_label, 20);
    for (const auto& v : as_array(m)) out << pad(v ? fixed(100.0 * *v, 4) : "n/a", 12);
    out << '\n';
    return out.str();
}

std::string confusion_table(const ConfusionMatrix& cm) {
    std::ostringstream out;
    out << pad_right("", 16) << pad("pred HPT", 12) << pad("pred Normal", 12) << '\n';
    out << pad_right("true HPT", 16) << pad(std::to_string(cm.tp), 12) << pad(std::to_string(cm.fn), 12) << '\n';
    out << pad_right("true Normal", 16) << pad(std::to_string(cm.fp), 12) << pad(std::to_string(cm.tn), 12) << '\n';
    return out.str();
}

std::string metrics_json(const ConfusionMatrix& pooled, const std::vector<ConfusionMatrix>& per_fold,
                         const MetricsReport& m) {
    json doc;
    doc["schema"] = kMetricsSchema;
    doc["pooled"] = cm_json(pooled);
    json folds = json::array();
    for (const auto& f : per_fold) folds.push_back(cm_json(f));
    doc["per_fold"] = std::move(folds);
    doc["metrics"] = metrics_object(m);
    return doc.dump(2) + "\n";
}

SegmentationComparison compare_segmentations(const RunReport& first, const RunReport& second) {
    SegmentationComparison cmp;
    auto label = [](const RunReport& r, const char* fallback) {
        return r.segment_len ? std::to_string(r.segment_len) + " length" : std::string(fallback);
    };
    cmp.first_label = label(first, "first");
    cmp.second_label = label(second, "second");
    if (cmp.first_label == cmp.second_label) {
        cmp.first_label += " (A)";
        cmp.second_label += " (B)";
    }
    const auto a = as_array(first.metrics);
    const auto b = as_array(second.metrics);
    for (std::size_t i = 0; i < kMetricNames.size(); ++i) {
        MetricComparison row{kMetricNames[i], a[i], b[i], std::nullopt};
        if (a[i] && b[i]) row.delta_points = 100.0 * (*a[i] - *b[i]);
        cmp.rows.push_back(row);
    }
    return cmp;
}

std::string comparison_table(const SegmentationComparison& cmp) {
    std::ostringstream out;
    out << pad_right("Decision Tree", 24);
    for (const auto& row : cmp.rows) out << pad(row.name + " (%)", 12);
    out << '\n' << pad_right(cmp.first_label, 24);
    for (const auto& row : cmp.rows) out << pad(row.first ? fixed(100.0 * *row.first, 3) : "n/a", 12);
    out << '\n' << pad_right(cmp.second_label, 24);
    for (const auto& row : cmp.rows) out << pad(row.second ? fixed(100.0 * *row.second, 3) : "n/a", 12);
    out << '\n' << pad_right("delta (points)", 24);
    for (const auto& row : cmp.rows) out << pad(row.delta_points ? fixed(*row.delta_points, 3) : "", 12);
    out << '\n';
    return out.str();
}

std::string comparison_json(const SegmentationComparison& cmp) {
    json rows = json::array();
    for (const auto& row : cmp.rows) {
        json r = {{"metric", row.name}, {"first", metric_value(row.first)}, {"second", metric_value(row.second)}};
        if (row.delta_points) r["delta_points"] = *row.delta_points;
        rows.push_back(std::move(r));
    }
    json doc = {{"schema", "ecgemd-comparison v1"},
                {"first", cmp.first_label},
                {"second", cmp.second_label},
                {"rows", std::move(rows)}};
    return doc.dump(2) + "\n";
}

std::string comparison_svg(const SegmentationComparison& cmp) {
    constexpr double kWidth = 640;
    constexpr double kHeight = 360;
    constexpr double kLeft = 60;
    constexpr double kRight = 20;
    constexpr double kTop = 40;
    constexpr double kBottom = 60;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;

    // Axis floor: one point below the smallest defined value, clamped to [0, 99].
    double lowest = 100.0;
    for (const auto& row : cmp.rows) {
        for (const auto& v : {row.first, row.second}) {
            if (v) lowest = std::min(lowest, 100.0 * *v);
        }
    }
    const double floor_pct = std::clamp(std::floor(lowest - 1.0), 0.0, 99.0);
    auto y_of = [&](double pct) { return kTop + plot_h * (1.0 - (pct - floor_pct) / (100.0 - floor_pct)); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << "Decision tree performance by segmentation (%)</text>\n";
    for (int t = 0; t <= 4; ++t) {
        const double pct = floor_pct + (100.0 - floor_pct) * t / 4.0;
        const double y = y_of(pct);
        svg << "<line x1=\"" << kLeft << "\" x2=\"" << kWidth - kRight << "\" y1=\"" << y << "\" y2=\"" << y
            << "\" stroke=\"#ddd\"/>\n";
        svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << fixed(pct, 2)
            << "</text>\n";
    }
    const double group_w = plot_w / static_cast<double>(cmp.rows.size());
    const double bar_w = group_w * 0.35;
    const char* colors[2] = {"#4c72b0", "#dd8452"};
    for (std::size_t i = 0; i < cmp.rows.size(); ++i) {
        const auto& row = cmp.rows[i];
        const double gx = kLeft + group_w * static_cast<double>(i);
        const std::optional<double> values[2] = {row.first, row.second};
        for (int s = 0; s < 2; ++s) {
            const double x = gx + group_w * 0.12 + bar_w * s;
            if (!values[s]) {
                svg << "<text x=\"" << x + bar_w / 2 << "\" y=\"" << kTop + plot_h - 4
                    << "\" text-anchor=\"middle\">n/a</text>\n";
                continue;
            }
            const double pct = 100.0 * *values[s];
            const double y = y_of(std::max(pct, floor_pct));
            svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << bar_w << "\" height=\""
                << kTop + plot_h - y << "\" fill=\"" << colors[s] << "\"/>\n";
        }
        svg << "<text x=\"" << gx + group_w / 2 << "\" y=\"" << kTop + plot_h + 16 << "\" text-anchor=\"middle\">"
            << xml_escape(row.name) << "</text>\n";
    }
    const std::string labels[2] = {cmp.first_label, cmp.second_label};
    for (int s = 0; s < 2; ++s) {
        const double x = kLeft + 200.0 * s;
        const double y = kHeight - 18;
        svg << "<rect x=\"" << x << "\" y=\"" << y - 10 << "\" width=\"12\" height=\"12\" fill=\"" << colors[s]
            << "\"/>\n";
        svg << "<text x=\"" << x + 18 << "\" y=\"" << y << "\">" << xml_escape(labels[s]) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::vector<std::filesystem::path> write_comparison(const SegmentationComparison& cmp,
                                                    const std::filesystem::path& out_dir) {
    const std::vector<std::filesystem::path> paths = {out_dir / "comparison.txt", out_dir / "comparison.json",
                                                      out_dir / "comparison.svg"};
    write_file_atomic(paths[0], comparison_table(cmp));
    write_file_atomic(paths[1], comparison_json(cmp));
    write_file_atomic(paths[2], comparison_svg(cmp));
    return paths;
}

}  // namespace ecgemd
