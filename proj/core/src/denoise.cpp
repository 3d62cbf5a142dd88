#include "ecgemd/denoise.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>

#include "ecgemd/error.hpp"

namespace ecgemd {
namespace {

struct FilterBank {
    std::vector<double> lowpass;
    std::vector<double> highpass;
};

FilterBank make_filter_bank(std::string_view wavelet) {
    const auto h = daubechies_lowpass(wavelet);
    FilterBank bank{{h.begin(), h.end()}, std::vector<double>(h.size())};
    const std::size_t len = h.size();
    for (std::size_t n = 0; n < len; ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        bank.highpass[n] = sign * h[len - 1 - n];
    }
    return bank;
}

// One analysis step with periodic extension. `x` must have even length.
void analyze(std::span<const double> x, const FilterBank& bank, std::vector<double>& approx,
             std::vector<double>& detail) {
    const std::size_t m = x.size();
    const std::size_t half = m / 2;
    const std::size_t len = bank.lowpass.size();
    approx.assign(half, 0.0);
    detail.assign(half, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        double a = 0.0;
        double d = 0.0;
        for (std::size_t n = 0; n < len; ++n) {
            const double v = x[(2 * k + n) % m];
            a += bank.lowpass[n] * v;
            d += bank.highpass[n] * v;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

// Adjoint of analyze(); output has length 2 * approx.size().
std::vector<double> synthesize(std::span<const double> approx, std::span<const double> detail,
                               const FilterBank& bank) {
    const std::size_t half = approx.size();
    const std::size_t m = 2 * half;
    const std::size_t len = bank.lowpass.size();
    std::vector<double> y(m, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        for (std::size_t n = 0; n < len; ++n) {
            y[(2 * k + n) % m] += bank.lowpass[n] * approx[k] + bank.highpass[n] * detail[k];
        }
    }
    return y;
}

double median_abs(std::span<const double> values) {
    if (values.empty()) return 0.0;
    std::vector<double> mags(values.size());
    std::transform(values.begin(), values.end(), mags.begin(), [](double v) { return std::abs(v); });
    const std::size_t mid = mags.size() / 2;
    std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(mid), mags.end());
    const double upper = mags[mid];
    if (mags.size() % 2 == 1) return upper;
    const double lower = *std::max_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

}  // namespace

ThresholdRule parse_threshold_rule(std::string_view text) {
    std::string key(text);
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (key == "universal-soft") return ThresholdRule::kUniversalSoft;
    if (key == "universal-hard") return ThresholdRule::kUniversalHard;
    if (key == "none") return ThresholdRule::kNone;
    throw ConfigError("unknown threshold rule '" + std::string(text) +
                      "' (expected universal-soft, universal-hard or none)");
}

std::string_view to_string(ThresholdRule rule) noexcept {
    switch (rule) {
        case ThresholdRule::kUniversalSoft: return "universal-soft";
        case ThresholdRule::kUniversalHard: return "universal-hard";
        case ThresholdRule::kNone: return "none";
    }
    return "none";
}

void validate(const DenoiseConfig& config, std::size_t n) {
    const auto filter_len = daubechies_lowpass(config.wavelet).size();
    if (config.levels < 1) throw ConfigError("denoise levels must be >= 1");
    if (n < filter_len) {
        throw DataError("signal of length " + std::to_string(n) + " is shorter than the " + config.wavelet +
                        " filter (" + std::to_string(filter_len) + " taps)");
    }
    const auto max_levels = static_cast<int>(std::bit_width(n) - 1);  // floor(log2 n)
    if (config.levels > max_levels) {
        throw DataError("signal of length " + std::to_string(n) + " supports at most " +
                        std::to_string(max_levels) + " decomposition levels, " +
                        std::to_string(config.levels) + " requested");
    }
}

WaveletPyramid dwt_decompose(std::span<const double> signal, const DenoiseConfig& config) {
    validate(config, signal.size());
    const auto bank = make_filter_bank(config.wavelet);

    WaveletPyramid pyramid;
    std::vector<double> current(signal.begin(), signal.end());
    std::vector<double> approx;
    std::vector<double> detail;
    for (int level = 0; level < config.levels; ++level) {
        pyramid.input_lengths.push_back(current.size());
        if (current.size() % 2 == 1) current.push_back(current.back());
        analyze(current, bank, approx, detail);
        pyramid.details.push_back(std::move(detail));
        current.swap(approx);
        detail.clear();
    }
    pyramid.approximation = std::move(current);
    return pyramid;
}

std::vector<double> dwt_reconstruct(const WaveletPyramid& pyramid, const DenoiseConfig& config) {
    const auto levels = static_cast<std::size_t>(config.levels);
    if (pyramid.details.size() != levels || pyramid.input_lengths.size() != levels) {
        throw DataError("wavelet pyramid has " + std::to_string(pyramid.details.size()) +
                        " detail bands, config expects " + std::to_string(levels));
    }
    for (std::size_t j = 0; j < levels; ++j) {
        const std::size_t expected = (pyramid.input_lengths[j] + 1) / 2;
        const std::size_t next = j + 1 < levels ? pyramid.input_lengths[j + 1] : pyramid.approximation.size();
        if (pyramid.details[j].size() != expected || next != expected) {
            throw DataError("inconsistent wavelet pyramid shape at level " + std::to_string(j + 1));
        }
    }
    const auto bank = make_filter_bank(config.wavelet);
    std::vector<double> current = pyramid.approximation;
    for (std::size_t j = levels; j-- > 0;) {
        current = synthesize(current, pyramid.details[j], bank);
        current.resize(pyramid.input_lengths[j]);
    }
    return current;
}

double mad_sigma(std::span<const double> band) { return median_abs(band) / 0.6745; }

double universal_threshold(double sigma, std::size_t n) {
    if (n < 2) return 0.0;
    return sigma * std::sqrt(2.0 * std::log(static_cast<double>(n)));
}

void apply_threshold(std::span<double> band, double t, ThresholdRule rule) {
    switch (rule) {
        case ThresholdRule::kUniversalSoft:
            for (auto& v : band) v = soft_threshold(v, t);
            break;
        case ThresholdRule::kUniversalHard:
            for (auto& v : band) v = hard_threshold(v, t);
            break;
        case ThresholdRule::kNone:
            break;
    }
}

WaveletPyramid threshold_coefficients(WaveletPyramid pyramid, const DenoiseConfig& config) {
    if (config.rule == ThresholdRule::kNone || pyramid.details.empty()) return pyramid;
    const std::size_t n = pyramid.signal_length();
    const double global_t = universal_threshold(mad_sigma(pyramid.details.front()), n);
    for (auto& band : pyramid.details) {
        const double t = config.per_level_sigma ? universal_threshold(mad_sigma(band), n) : global_t;
        apply_threshold(band, t, config.rule);
    }
    return pyramid;
}

std::vector<double> denoise(std::span<const double> signal, const DenoiseConfig& config) {
    auto pyramid = dwt_decompose(signal, config);
    pyramid = threshold_coefficients(std::move(pyramid), config);
    return dwt_reconstruct(pyramid, config);
}

}  // namespace ecgemd
