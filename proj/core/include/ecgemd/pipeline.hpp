#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecgemd/denoise.hpp"
#include "ecgemd/emd.hpp"
#include "ecgemd/eval.hpp"
#include "ecgemd/features.hpp"
#include "ecgemd/segment.hpp"
#include "ecgemd/tree.hpp"

namespace ecgemd {

/// Version string written into reports and stage manifests.
std::string_view tool_version() noexcept;

struct PipelineConfig {
    std::filesystem::path manifest;
    DenoiseConfig denoise;
    SegmentationConfig segmentation;
    EmdConfig emd;
    FeatureConfig features;
    TreeConfig tree;
    EvalConfig eval;
    std::filesystem::path out_dir = "ecgemd-out";
    std::size_t workers = 1;
};

/// Throws ConfigError on any out-of-range field (does not touch the disk).
void validate(const PipelineConfig& config);

/// JSON config document. Missing keys keep their defaults; unknown keys are
/// rejected. Relative paths resolve against `base_dir`.
PipelineConfig parse_pipeline_config(std::string_view json_text, const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Canonical JSON of every field, used as the run's config snapshot.
std::string config_snapshot(const PipelineConfig& config);

enum class Stage { kIngest, kDenoise, kSegment, kFeatures, kTrain, kEvaluate };

inline constexpr std::array<Stage, 6> kAllStages = {Stage::kIngest,   Stage::kDenoise, Stage::kSegment,
                                                    Stage::kFeatures, Stage::kTrain,   Stage::kEvaluate};

std::string_view to_string(Stage stage) noexcept;
Stage parse_stage(std::string_view name);

struct StageResult {
    Stage stage = Stage::kIngest;
    bool cached = false;
    double seconds = 0.0;
    /// Output files relative to the stage directory.
    std::vector<std::string> outputs;
};

/// Directory holding a stage's artifacts under `out_dir`.
std::filesystem::path stage_dir(const PipelineConfig& config, Stage stage);

/// Runs one stage. Its inputs (upstream artifacts, config section) are
/// fingerprinted; when the fingerprint and every recorded output checksum
/// still match, nothing is recomputed and the result is marked cached.
/// Throws ConfigError naming the missing artifact when an upstream stage has
/// not been run.
StageResult run_stage(Stage stage, const PipelineConfig& config);

/// All stages in order, then the run report.
std::vector<StageResult> run_all(const PipelineConfig& config);

/// Per-class segment counts recorded by the segment stage.
struct SegmentCounts {
    std::size_t hpt = 0;
    std::size_t normal = 0;
};

/// Path of the run report written after evaluation.
std::filesystem::path report_path(const PipelineConfig& config);

}  // namespace ecgemd
