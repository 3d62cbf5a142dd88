#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecgemd/dataset.hpp"
#include "ecgemd/tree.hpp"

namespace ecgemd {

struct EvalConfig {
    std::size_t k_folds = 5;
    std::uint64_t shuffle_seed = 42;
    bool stratified = true;
    /// Folds trained concurrently.
    std::size_t workers = 1;
};

/// HPT is the positive class.
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;

    std::uint64_t total() const noexcept { return tp + fn + tn + fp; }
    ConfusionMatrix& operator+=(const ConfusionMatrix& o) noexcept;
    bool operator==(const ConfusionMatrix&) const = default;
};

/// Each metric is a fraction in [0, 1], or nullopt when its denominator is 0.
struct MetricsReport {
    std::optional<double> acc;
    std::optional<double> rec;
    std::optional<double> spe;
    std::optional<double> pre;
    std::optional<double> f1;

    bool operator==(const MetricsReport&) const = default;
};

/// Deterministic Fisher-Yates shuffle driven by a 64-bit Mersenne twister;
/// independent of the standard library's distribution implementations.
void seeded_shuffle(std::span<std::size_t> values, std::uint64_t seed);

/// Partitions indices 0..labels.size()-1 into k folds. When stratified, each
/// class is shuffled and dealt round-robin, continuing the rotation across
/// classes so fold sizes differ by at most one overall and per class.
std::vector<std::vector<std::size_t>> make_folds(std::span<const ClassLabel> labels, const EvalConfig& config);

ConfusionMatrix confusion(std::span<const ClassLabel> predictions, std::span<const ClassLabel> truths);

MetricsReport metrics(const ConfusionMatrix& cm);

/// "99.639%" style rendering with `decimals` places, or "n/a".
std::string format_percent(const std::optional<double>& fraction, int decimals = 4);

struct CrossValidationResult {
    std::vector<std::vector<std::size_t>> folds;
    std::vector<ConfusionMatrix> per_fold;
    ConfusionMatrix pooled;
    MetricsReport metrics;
    /// Held-out prediction for every row.
    std::vector<ClassLabel> predictions;
};

/// k-fold cross-validation of a decision tree. Pooled matrix is the sum of
/// the per-fold test matrices; metrics are computed from it.
CrossValidationResult cross_validate(const TrainingSet& data, const TreeConfig& tree_config,
                                     const EvalConfig& eval_config);

}  // namespace ecgemd
