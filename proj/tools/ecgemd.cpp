// ecgemd: staged ECG hypertension-screening pipeline.
//
//   ingest -> denoise -> segment -> features -> train / evaluate
//
// Every stage writes into <out>/<stage>/ together with a stage.json checksum
// manifest; re-running a stage whose inputs did not change is a no-op.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ecgemd/error.hpp"
#include "ecgemd/pipeline.hpp"
#include "ecgemd/report.hpp"

namespace {

constexpr const char* kFooter = R"(Files
  Manifest (--manifest or "manifest" in the config): comma-separated rows
      path,id,label[,format[,gain[,baseline]]]
    label   HPT or Normal (case-insensitive)
    format  text    one ASCII decimal sample per line (default)
            int16le headerless 16-bit signed little-endian; value = (raw - baseline) / gain
    Lines starting with '#' are comments; a first row starting with "path" is a header.
    "%trim_prefix_hpt=<n>" sets the number of leading samples dropped from HPT records
    (default 20000; Normal records are never trimmed). Relative paths resolve against
    the manifest's directory.

  Config (--config): JSON with optional sections manifest, out, workers,
    denoise{wavelet,levels,rule,per_level_sigma}, segment{segment_len},
    emd{num_imfs,sd_stop,max_sift_iters,envelope_boundary,spline,symmetry_tolerance,strict_crossing_rule},
    features{entropy_threshold_eps,norm_p,apen_m,apen_r_factor,apen_max_samples,sure_enabled},
    tree{max_depth,min_samples_split,min_samples_leaf,impurity}, eval{k_folds,shuffle_seed,stratified}.

  Outputs under --out:
    ingest/, denoise/   records.csv (id,label,length,file) + records/*.bin sample files
                        ("ecgemd-samples v1 <n>" line, then n little-endian doubles)
    segment/            segments.csv (record_id,label,offset,length,file)
    features/           features.csv (record_id,offset,label,imf1_std..imf5_apen; %.17g)
    train/              model.json (tree document)
    evaluate/           metrics.json, metrics.txt, confusion.txt, folds.csv
    report.json         run report (timings, segment counts, confusion matrix, metrics, config)
  Every text intermediate starts with a schema-version line.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal invariant violation.
)";

struct GlobalOptions {
    std::string config_path;
    std::string manifest;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
};

ecgemd::PipelineConfig resolve_config(const GlobalOptions& opts) {
    ecgemd::PipelineConfig config;
    if (!opts.config_path.empty()) config = ecgemd::load_pipeline_config(opts.config_path);
    if (!opts.manifest.empty()) config.manifest = opts.manifest;
    if (!opts.out.empty()) config.out_dir = opts.out;
    if (opts.seed) config.eval.shuffle_seed = *opts.seed;
    if (opts.workers) config.workers = *opts.workers;
    ecgemd::validate(config);
    return config;
}

void print_result(const ecgemd::StageResult& r) {
    std::cout << ecgemd::to_string(r.stage) << ": " << (r.cached ? "cached" : "built");
    if (!r.cached) std::cout << " in " << r.seconds << " s";
    std::cout << " (" << r.outputs.size() << " output files)\n";
}

void print_summary(const ecgemd::PipelineConfig& config) {
    const auto report = ecgemd::load_run_report(ecgemd::report_path(config));
    std::cout << "\nsegments: HPT " << report.segment_counts.hpt << ", Normal " << report.segment_counts.normal
              << "\n\n"
              << ecgemd::confusion_table(report.pooled) << '\n'
              << ecgemd::metrics_table(report.metrics, std::to_string(report.segment_len) + " length");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ecgemd - EMD entropy features and decision-tree screening for hypertension ECG"};
    app.footer(kFooter);
    app.require_subcommand(1);

    GlobalOptions opts;
    app.add_option("--config", opts.config_path, "Pipeline config (JSON)");
    app.add_option("--manifest", opts.manifest, "Dataset manifest (overrides the config)");
    app.add_option("--out", opts.out, "Output directory (overrides the config)");
    app.add_option("--seed", opts.seed, "Cross-validation shuffle seed (default 42)");
    app.add_option("--workers", opts.workers, "Worker threads (default 1)")->check(CLI::PositiveNumber);

    std::optional<ecgemd::Stage> single_stage;
    for (const auto stage : ecgemd::kAllStages) {
        const std::string name(ecgemd::to_string(stage));
        app.add_subcommand(name, "Run the " + name + " stage")->callback([&single_stage, stage] {
            single_stage = stage;
        });
    }
    bool all = false;
    app.add_subcommand("run-all", "Run every stage in order and write report.json")->callback([&all] { all = true; });

    std::string report_a;
    std::string report_b;
    auto* compare = app.add_subcommand("compare", "Compare two run reports (side-by-side metrics table + bar chart)");
    compare->add_option("first", report_a, "First run report.json")->required()->check(CLI::ExistingFile);
    compare->add_option("second", report_b, "Second run report.json")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(ecgemd::ExitCode::kUsage);
    }

    try {
        if (compare->parsed()) {
            const auto cmp = ecgemd::compare_segmentations(ecgemd::load_run_report(report_a),
                                                           ecgemd::load_run_report(report_b));
            const std::filesystem::path out = opts.out.empty() ? std::filesystem::path("comparison") : std::filesystem::path(opts.out);
            std::cout << ecgemd::comparison_table(cmp);
            for (const auto& p : ecgemd::write_comparison(cmp, out)) std::cout << "wrote " << p.string() << '\n';
            return 0;
        }
        const auto config = resolve_config(opts);
        if (all) {
            for (const auto& r : ecgemd::run_all(config)) print_result(r);
            print_summary(config);
        } else if (single_stage) {
            print_result(ecgemd::run_stage(*single_stage, config));
            if (*single_stage == ecgemd::Stage::kEvaluate) print_summary(config);
        }
        return 0;
    } catch (const ecgemd::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.exit_code());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return static_cast<int>(ecgemd::ExitCode::kInvariant);
    }
}
