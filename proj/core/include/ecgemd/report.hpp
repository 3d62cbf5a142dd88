#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ecgemd/eval.hpp"
#include "ecgemd/pipeline.hpp"

namespace ecgemd {

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
    bool cached = false;
};

/// Summary of one end-to-end run.
struct RunReport {
    std::string tool_version;
    std::string config_snapshot;  ///< canonical config JSON
    std::size_t segment_len = 0;
    SegmentCounts segment_counts;
    std::vector<StageTiming> stages;
    std::vector<ConfusionMatrix> per_fold;
    ConfusionMatrix pooled;
    MetricsReport metrics;
};

std::string to_json(const RunReport& report);
/// Throws DataError if required sections (confusion matrix, metrics) are absent.
RunReport parse_run_report(std::string_view json_text);
RunReport load_run_report(const std::filesystem::path& path);

/// Acc/Rec/Spe/Pre/F1 table, one row.
std::string metrics_table(const MetricsReport& m, const std::string& row_label);

/// 2x2 labeled confusion matrix.
std::string confusion_table(const ConfusionMatrix& cm);

/// Machine-readable metrics document; undefined metrics are the string "n/a".
std::string metrics_json(const ConfusionMatrix& pooled, const std::vector<ConfusionMatrix>& per_fold,
                         const MetricsReport& m);

struct MetricComparison {
    std::string name;
    std::optional<double> first;
    std::optional<double> second;
    /// first - second in percentage points; absent if either side is n/a.
    std::optional<double> delta_points;
};

struct SegmentationComparison {
    std::string first_label;
    std::string second_label;
    std::vector<MetricComparison> rows;  ///< Acc, Rec, Spe, Pre, F1
};

SegmentationComparison compare_segmentations(const RunReport& first, const RunReport& second);

std::string comparison_table(const SegmentationComparison& cmp);
std::string comparison_json(const SegmentationComparison& cmp);
/// Grouped bar chart, one group per metric.
std::string comparison_svg(const SegmentationComparison& cmp);

/// Writes comparison.txt, comparison.json and comparison.svg into `out_dir`;
/// returns the written paths.
std::vector<std::filesystem::path> write_comparison(const SegmentationComparison& cmp,
                                                    const std::filesystem::path& out_dir);

}  // namespace ecgemd
