#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecgemd/dataset.hpp"
#include "ecgemd/emd.hpp"

namespace ecgemd {

struct FeatureConfig {
    /// Magnitude threshold for the threshold and SURE entropies.
    double entropy_threshold_eps = 0.2;
    /// Exponent of the norm entropy, 1 <= p < 2.
    double norm_p = 1.1;
    int apen_m = 2;
    /// ApEn tolerance r = apen_r_factor * std(x).
    double apen_r_factor = 0.2;
    /// Compute ApEn on this many leading samples only; unset = all.
    std::optional<std::size_t> apen_max_samples;
    /// When false the SURE column is written as 0.
    bool sure_enabled = true;
};

void validate(const FeatureConfig& config);

/// Per-IMF measures in column order.
enum class Measure : std::size_t {
    kStd,
    kMean,
    kRms,
    kShannon,
    kLogEnergy,
    kThreshold,
    kSure,
    kNorm,
    kApEn,
};

inline constexpr std::size_t kMeasuresPerImf = 9;
inline constexpr std::size_t kFeatureImfs = 5;
inline constexpr std::size_t kFeatureCount = kMeasuresPerImf * kFeatureImfs;

std::string_view measure_name(Measure measure) noexcept;

/// Column index of `measure` for 0-based IMF `imf`.
constexpr std::size_t feature_index(std::size_t imf, Measure measure) noexcept {
    return kMeasuresPerImf * imf + static_cast<std::size_t>(measure);
}

/// `imf1_std`, `imf1_mean`, ..., `imf5_apen`.
const std::array<std::string, kFeatureCount>& feature_names();

struct FeatureVector {
    std::string record_id;
    std::size_t offset = 0;
    ClassLabel label = ClassLabel::kNormal;
    std::array<double, kFeatureCount> values{};
};

// Time-domain measures. All throw DataError on empty input.
double mean(std::span<const double> x);
/// Population standard deviation (divides by N).
double std_dev(std::span<const double> x);
double rms(std::span<const double> x);

/// -sum x^2 ln(x^2); zero samples contribute 0.
double shannon_entropy(std::span<const double> x);
/// sum ln(x^2); zero samples contribute 0.
double log_energy_entropy(std::span<const double> x);
/// Number of samples with |x| > eps.
double threshold_entropy(std::span<const double> x, double eps);
/// N - #{|x| <= eps} + sum min(x^2, eps^2).
double sure_entropy(std::span<const double> x, double eps);
/// sum |x|^p.
double norm_entropy(std::span<const double> x, double p);

/// Approximate entropy Phi_m - Phi_{m+1} with Chebyshev template distance,
/// self-matches counted. Requires x.size() > m + 1 and r > 0.
double approximate_entropy(std::span<const double> x, int m, double r);

/// ApEn with r = apen_r_factor * std(x) over the configured prefix.
/// Returns 0 for a constant prefix.
double approximate_entropy(std::span<const double> x, const FeatureConfig& config);

/// The nine measures of one IMF in column order.
std::array<double, kMeasuresPerImf> imf_measures(std::span<const double> imf, const FeatureConfig& config);

/// 45 values, IMF-major. Requires exactly kFeatureImfs IMFs.
FeatureVector extract_features(const ImfDecomposition& dec, const FeatureConfig& config);

/// Delimited features table: schema line, header row, one row per segment,
/// doubles at 17 significant digits.
void write_feature_table(std::ostream& out, std::span<const FeatureVector> rows);
std::vector<FeatureVector> read_feature_table(std::istream& in);

inline constexpr std::string_view kFeatureTableSchema = "# ecgemd-features v1";

}  // namespace ecgemd
