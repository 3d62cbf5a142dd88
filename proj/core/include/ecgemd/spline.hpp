#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ecgemd {

enum class SplineEnd {
    /// Third derivative continuous across the second and second-to-last knots.
    /// Reproduces cubic polynomials exactly.
    kNotAKnot,
    /// Zero second derivative at both ends.
    kNatural,
};

/// Piecewise-cubic C2 interpolant through strictly increasing knots.
///
/// Two knots give the straight line through them; three knots with
/// kNotAKnot give the interpolating parabola.
class CubicSpline {
public:
    CubicSpline(std::span<const double> x, std::span<const double> y, SplineEnd end = SplineEnd::kNotAKnot);

    double operator()(double at) const;

    /// Evaluates at 0, 1, ..., count-1. Faster than repeated operator() calls.
    std::vector<double> sample_grid(std::size_t count) const;

    /// Writes the grid evaluation into `out` (resized to `count`).
    void sample_grid(std::size_t count, std::vector<double>& out) const;

    std::span<const double> knots() const noexcept { return x_; }

private:
    double eval_piece(std::size_t i, double at) const;

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> slope_;
};

}  // namespace ecgemd
