#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ecgemd {

/// Orthonormal Daubechies scaling filter (db1 .. db10). `name` is "haar" or
/// "dbN". Throws ConfigError for unknown names.
std::span<const double> daubechies_lowpass(std::string_view name);

enum class ThresholdRule {
    kUniversalSoft,
    kUniversalHard,
    kNone,
};

ThresholdRule parse_threshold_rule(std::string_view text);
std::string_view to_string(ThresholdRule rule) noexcept;

struct DenoiseConfig {
    std::string wavelet = "db4";
    int levels = 4;
    ThresholdRule rule = ThresholdRule::kUniversalSoft;
    /// Estimate the noise level separately for each detail band instead of
    /// from the finest band only.
    bool per_level_sigma = false;
};

/// Multilevel periodic DWT coefficients.
///
/// `details[0]` is the finest band. `input_lengths[j]` is the length of the
/// sequence fed to level j+1 (so `input_lengths[0]` is the signal length).
/// Odd-length inputs are extended by repeating their last sample before
/// filtering, so band j holds ceil(input_lengths[j] / 2) coefficients.
struct WaveletPyramid {
    std::vector<double> approximation;
    std::vector<std::vector<double>> details;
    std::vector<std::size_t> input_lengths;

    std::size_t signal_length() const noexcept {
        return input_lengths.empty() ? 0 : input_lengths.front();
    }
};

/// Throws ConfigError if `config` cannot be applied to a signal of length `n`.
void validate(const DenoiseConfig& config, std::size_t n);

WaveletPyramid dwt_decompose(std::span<const double> signal, const DenoiseConfig& config);
std::vector<double> dwt_reconstruct(const WaveletPyramid& pyramid, const DenoiseConfig& config);

/// MAD noise estimate median(|band|) / 0.6745.
double mad_sigma(std::span<const double> band);

/// sigma * sqrt(2 ln n).
double universal_threshold(double sigma, std::size_t n);

inline double soft_threshold(double x, double t) noexcept {
    const double mag = (x < 0 ? -x : x) - t;
    if (mag <= 0) return 0.0;
    return x < 0 ? -mag : mag;
}

inline double hard_threshold(double x, double t) noexcept {
    return (x < 0 ? -x : x) > t ? x : 0.0;
}

/// Shrinks `band` in place with threshold `t`.
void apply_threshold(std::span<double> band, double t, ThresholdRule rule);

/// Universal-threshold shrinkage of every detail band; the approximation
/// band is left untouched.
WaveletPyramid threshold_coefficients(WaveletPyramid pyramid, const DenoiseConfig& config);

/// decompose -> threshold -> reconstruct. Output has the input's length.
std::vector<double> denoise(std::span<const double> signal, const DenoiseConfig& config);

}  // namespace ecgemd
