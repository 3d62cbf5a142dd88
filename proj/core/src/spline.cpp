#include "ecgemd/spline.hpp"

#include <algorithm>

#include "ecgemd/error.hpp"

namespace ecgemd {
namespace {

// Thomas algorithm. `lower[i]` couples row i to i-1, `upper[i]` row i to i+1.
void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag, std::vector<double>& upper,
                       std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

}  // namespace

CubicSpline::CubicSpline(std::span<const double> x, std::span<const double> y, SplineEnd end)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), slope_(x.size(), 0.0) {
    const std::size_t n = x_.size();
    if (n != y_.size()) throw InvariantError("spline knot/value size mismatch");
    if (n < 2) throw DataError("cubic spline needs at least 2 knots");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(x_[i] > x_[i - 1])) throw InvariantError("spline knots must be strictly increasing");
    }

    std::vector<double> dx(n - 1);
    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        dx[i] = x_[i + 1] - x_[i];
        delta[i] = (y_[i + 1] - y_[i]) / dx[i];
    }

    if (n == 2) {
        slope_[0] = slope_[1] = delta[0];
        return;
    }
    if (n == 3 && end == SplineEnd::kNotAKnot) {
        // Interpolating parabola: slopes from its derivative at each knot.
        const double c2 = (delta[1] - delta[0]) / (x_[2] - x_[0]);
        slope_[0] = delta[0] - c2 * dx[0];
        slope_[1] = delta[0] + c2 * dx[0];
        slope_[2] = delta[1] + c2 * dx[1];
        return;
    }

    std::vector<double> lower(n, 0.0);
    std::vector<double> diag(n, 0.0);
    std::vector<double> upper(n, 0.0);
    std::vector<double> rhs(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        lower[i] = dx[i];
        diag[i] = 2.0 * (dx[i - 1] + dx[i]);
        upper[i] = dx[i - 1];
        rhs[i] = 3.0 * (dx[i] * delta[i - 1] + dx[i - 1] * delta[i]);
    }
    if (end == SplineEnd::kNatural) {
        diag[0] = 2.0;
        upper[0] = 1.0;
        rhs[0] = 3.0 * delta[0];
        lower[n - 1] = 1.0;
        diag[n - 1] = 2.0;
        rhs[n - 1] = 3.0 * delta[n - 2];
    } else {
        const double x31 = dx[0] + dx[1];
        diag[0] = dx[1];
        upper[0] = x31;
        rhs[0] = ((dx[0] + 2.0 * x31) * dx[1] * delta[0] + dx[0] * dx[0] * delta[1]) / x31;
        const double xn = dx[n - 3] + dx[n - 2];
        lower[n - 1] = xn;
        diag[n - 1] = dx[n - 3];
        rhs[n - 1] = (dx[n - 2] * dx[n - 2] * delta[n - 3] + (2.0 * xn + dx[n - 2]) * dx[n - 3] * delta[n - 2]) / xn;
    }
    solve_tridiagonal(lower, diag, upper, rhs);
    slope_ = std::move(rhs);
}

double CubicSpline::eval_piece(std::size_t i, double at) const {
    const double h = x_[i + 1] - x_[i];
    const double delta = (y_[i + 1] - y_[i]) / h;
    const double t = at - x_[i];
    const double c2 = (3.0 * delta - 2.0 * slope_[i] - slope_[i + 1]) / h;
    const double c3 = (slope_[i] + slope_[i + 1] - 2.0 * delta) / (h * h);
    return y_[i] + t * (slope_[i] + t * (c2 + t * c3));
}

double CubicSpline::operator()(double at) const {
    const auto it = std::upper_bound(x_.begin(), x_.end(), at);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    i = std::min(i, x_.size() - 2);
    return eval_piece(i, at);
}

std::vector<double> CubicSpline::sample_grid(std::size_t count) const {
    std::vector<double> out;
    sample_grid(count, out);
    return out;
}

void CubicSpline::sample_grid(std::size_t count, std::vector<double>& out) const {
    out.resize(count);
    std::size_t piece = 0;
    const std::size_t last_piece = x_.size() - 2;
    for (std::size_t k = 0; k < count; ++k) {
        const auto at = static_cast<double>(k);
        while (piece < last_piece && at >= x_[piece + 1]) ++piece;
        out[k] = eval_piece(piece, at);
    }
}

}  // namespace ecgemd
