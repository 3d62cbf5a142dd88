#include "ecgemd/emd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ecgemd {
namespace {

struct Knots {
    std::vector<double> x;
    std::vector<double> y;
};

// Envelope knots with optional mirror extension at both ends.
void build_knots(std::span<const std::size_t> index, std::span<const double> value, std::size_t length,
                 EnvelopeBoundary boundary, Knots& knots) {
    knots.x.clear();
    knots.y.clear();
    const std::size_t count = index.size();
    const std::size_t mirrored = boundary == EnvelopeBoundary::kMirror ? std::min<std::size_t>(2, count) : 0;
    for (std::size_t k = mirrored; k-- > 0;) {
        knots.x.push_back(-static_cast<double>(index[k]));
        knots.y.push_back(value[k]);
    }
    for (std::size_t k = 0; k < count; ++k) {
        knots.x.push_back(static_cast<double>(index[k]));
        knots.y.push_back(value[k]);
    }
    const double right_edge = 2.0 * static_cast<double>(length - 1);
    for (std::size_t k = 0; k < mirrored; ++k) {
        const std::size_t src = count - 1 - k;
        knots.x.push_back(right_edge - static_cast<double>(index[src]));
        knots.y.push_back(value[src]);
    }
}

void envelope_into(std::span<const std::size_t> index, std::span<const double> value, std::size_t length,
                   const EmdConfig& config, Knots& knots, std::vector<double>& out) {
    build_knots(index, value, length, config.envelope_boundary, knots);
    if (knots.x.size() < 2) {
        throw MonotoneResidual("monotone residual: " + std::to_string(knots.x.size()) +
                               " envelope knot(s), need at least 2");
    }
    CubicSpline(knots.x, knots.y, config.spline_end).sample_grid(length, out);
}

struct SiftWorkspace {
    Knots knots;
    std::vector<double> upper;
    std::vector<double> lower;
    std::vector<double> mean;
};

// Envelope mean of `h` for the given extrema, into ws.mean.
void envelope_mean(std::span<const double> h, const Extrema& ext, const EmdConfig& config, SiftWorkspace& ws) {
    envelope_into(ext.max_index, ext.max_value, h.size(), config, ws.knots, ws.upper);
    envelope_into(ext.min_index, ext.min_value, h.size(), config, ws.knots, ws.lower);
    ws.mean.resize(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) ws.mean[i] = 0.5 * (ws.upper[i] + ws.lower[i]);
}

bool crossing_rule_holds(std::span<const double> h, const Extrema& ext, const EmdConfig& config) {
    const auto crossings = static_cast<long long>(count_zero_crossings(h));
    if (config.strict_crossing_rule) return crossings >= static_cast<long long>(ext.max_index.size());
    const auto extrema = static_cast<long long>(ext.count());
    return std::llabs(crossings - extrema) <= 1;
}

bool symmetry_holds(std::span<const double> h, std::span<const double> mean, const EmdConfig& config) {
    double abs_mean = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        abs_mean += std::abs(mean[i]);
        sq += h[i] * h[i];
    }
    const auto n = static_cast<double>(h.size());
    return abs_mean / n <= config.symmetry_tolerance * std::sqrt(sq / n);
}

bool has_envelopes(const Extrema& ext) { return !ext.max_index.empty() && !ext.min_index.empty(); }

bool siftable(const Extrema& ext) { return ext.max_index.size() >= 2 && ext.min_index.size() >= 2; }

}  // namespace

void validate(const EmdConfig& config) {
    if (config.num_imfs < 1) throw ConfigError("emd num_imfs must be >= 1");
    if (!(config.sd_stop > 0.0 && config.sd_stop < 1.0)) throw ConfigError("emd sd_stop must lie in (0, 1)");
    if (config.max_sift_iters < 1) throw ConfigError("emd max_sift_iters must be >= 1");
    if (!(config.symmetry_tolerance > 0.0)) throw ConfigError("emd symmetry_tolerance must be > 0");
}

Extrema find_extrema(std::span<const double> signal) {
    Extrema ext;
    const std::size_t n = signal.size();
    if (n < 3) return ext;
    std::size_t i = 1;
    while (i + 1 < n) {
        std::size_t j = i;
        while (j + 1 < n && signal[j + 1] == signal[i]) ++j;
        if (j + 1 >= n) break;  // flat run reaches the last sample
        const double v = signal[i];
        const double left = signal[i - 1];
        const double right = signal[j + 1];
        const std::size_t mid = i + (j - i) / 2;
        if (v > left && v > right) {
            ext.max_index.push_back(mid);
            ext.max_value.push_back(v);
        } else if (v < left && v < right) {
            ext.min_index.push_back(mid);
            ext.min_value.push_back(v);
        }
        i = j + 1;
    }
    return ext;
}

std::size_t count_zero_crossings(std::span<const double> signal) {
    std::size_t crossings = 0;
    int last_sign = 0;
    for (const double v : signal) {
        const int sign = (v > 0) - (v < 0);
        if (sign == 0) continue;
        if (last_sign != 0 && sign != last_sign) ++crossings;
        last_sign = sign;
    }
    return crossings;
}

std::vector<double> envelope(std::span<const std::size_t> index, std::span<const double> value, std::size_t length,
                             const EmdConfig& config) {
    if (index.size() != value.size()) throw InvariantError("envelope index/value size mismatch");
    Knots knots;
    std::vector<double> out;
    envelope_into(index, value, length, config, knots, out);
    return out;
}

bool is_imf(std::span<const double> signal, const EmdConfig& config) {
    if (signal.size() < 3) return false;
    const auto ext = find_extrema(signal);
    if (!has_envelopes(ext)) return false;
    if (!crossing_rule_holds(signal, ext, config)) return false;
    SiftWorkspace ws;
    envelope_mean(signal, ext, config, ws);
    return symmetry_holds(signal, ws.mean, config);
}

SiftResult sift(std::span<const double> signal, const EmdConfig& config) {
    auto ext = find_extrema(signal);
    if (!siftable(ext)) {
        throw MonotoneResidual("no IMF extractable: " + std::to_string(ext.max_index.size()) + " maxima, " +
                               std::to_string(ext.min_index.size()) + " minima");
    }
    SiftWorkspace ws;
    SiftResult result;
    auto& h = result.imf;
    h.assign(signal.begin(), signal.end());
    envelope_mean(h, ext, config, ws);

    for (int it = 1; it <= config.max_sift_iters; ++it) {
        result.iterations = it;
        double moved = 0.0;
        double energy = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            energy += h[i] * h[i];
            moved += ws.mean[i] * ws.mean[i];
            h[i] -= ws.mean[i];
        }
        const double sd = energy > 0.0 ? moved / energy : 0.0;

        ext = find_extrema(h);
        if (!siftable(ext)) break;
        envelope_mean(h, ext, config, ws);
        if (sd < config.sd_stop && crossing_rule_holds(h, ext, config) && symmetry_holds(h, ws.mean, config)) break;
    }
    return result;
}

ImfDecomposition emd_decompose(std::span<const double> segment, const EmdConfig& config) {
    validate(config);
    if (segment.size() < kMinEmdLength) {
        throw DataError("EMD needs at least " + std::to_string(kMinEmdLength) + " samples, got " +
                        std::to_string(segment.size()));
    }
    const auto num_imfs = static_cast<std::size_t>(config.num_imfs);
    ImfDecomposition dec;
    dec.residual.assign(segment.begin(), segment.end());
    dec.imfs.reserve(num_imfs);
    while (dec.imfs.size() < num_imfs) {
        if (!siftable(find_extrema(dec.residual))) break;
        auto sifted = sift(dec.residual, config);
        for (std::size_t i = 0; i < dec.residual.size(); ++i) dec.residual[i] -= sifted.imf[i];
        dec.imfs.push_back(std::move(sifted.imf));
        dec.sift_iterations.push_back(sifted.iterations);
    }
    dec.extracted = dec.imfs.size();
    dec.imfs.resize(num_imfs, std::vector<double>(segment.size(), 0.0));
    return dec;
}

}  // namespace ecgemd
