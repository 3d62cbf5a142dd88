#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ecgemd/error.hpp"
#include "ecgemd/spline.hpp"

namespace ecgemd {

enum class EnvelopeBoundary {
    /// Reflect the two extrema nearest each end across the boundary sample.
    kMirror,
    /// Spline through the interior extrema only; ends are extrapolated.
    kNone,
};

struct EmdConfig {
    int num_imfs = 5;
    /// Cauchy stop: sum (h_prev - h)^2 / sum h_prev^2 below this ends sifting.
    double sd_stop = 0.2;
    int max_sift_iters = 100;
    EnvelopeBoundary envelope_boundary = EnvelopeBoundary::kMirror;
    SplineEnd spline_end = SplineEnd::kNotAKnot;
    /// Envelope symmetry: mean |(upper + lower) / 2| <= tolerance * rms(signal).
    double symmetry_tolerance = 0.05;
    /// Use the literal "zero crossings >= number of peaks (maxima)" test instead
    /// of |zero crossings - extrema| <= 1.
    bool strict_crossing_rule = false;
};

/// Throws ConfigError when a field is out of range.
void validate(const EmdConfig& config);

struct Extrema {
    std::vector<std::size_t> max_index;
    std::vector<double> max_value;
    std::vector<std::size_t> min_index;
    std::vector<double> min_value;

    std::size_t count() const noexcept { return max_index.size() + min_index.size(); }
};

/// Strict interior local extrema by three-point comparison. A flat run
/// bounded on both sides by lower (higher) samples is one maximum (minimum)
/// at its midpoint. The first and last samples are never extrema.
Extrema find_extrema(std::span<const double> signal);

/// Number of sign changes, ignoring exact zeros.
std::size_t count_zero_crossings(std::span<const double> signal);

/// Thrown when fewer than two envelope knots remain, i.e. the signal is
/// monotone or nearly so.
class MonotoneResidual : public DataError {
public:
    using DataError::DataError;
};

/// Cubic spline through `(index, value)` knots, after the boundary extension
/// selected in `config`, evaluated at every sample index 0..length-1.
std::vector<double> envelope(std::span<const std::size_t> index, std::span<const double> value,
                             std::size_t length, const EmdConfig& config = {});

/// IMF admissibility: zero-crossing/extrema balance plus envelope symmetry.
bool is_imf(std::span<const double> signal, const EmdConfig& config = {});

struct SiftResult {
    std::vector<double> imf;
    int iterations = 0;
};

/// Extracts one IMF by repeatedly subtracting the envelope mean. Throws
/// MonotoneResidual ("no IMF extractable") when the input has fewer than two
/// maxima or two minima.
SiftResult sift(std::span<const double> signal, const EmdConfig& config = {});

struct ImfDecomposition {
    /// Always `num_imfs` entries; slots past `extracted` are all zero.
    std::vector<std::vector<double>> imfs;
    std::vector<double> residual;
    std::size_t extracted = 0;
    std::vector<int> sift_iterations;

    /// Fewer IMFs than requested could be extracted.
    bool incomplete() const noexcept { return extracted < imfs.size(); }
};

inline constexpr std::size_t kMinEmdLength = 16;

/// Empirical mode decomposition into `config.num_imfs` IMFs plus residual.
/// Stops early once the residual has fewer than two maxima or two minima.
ImfDecomposition emd_decompose(std::span<const double> segment, const EmdConfig& config = {});

}  // namespace ecgemd
