#include "ecgemd/features.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "ecgemd/error.hpp"

namespace ecgemd {
namespace {

void require_non_empty(std::span<const double> x, const char* what) {
    if (x.empty()) throw DataError(std::string(what) + " of an empty sequence");
}

std::string format_double(double v) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(len));
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> cols;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        cols.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cols;
}

}  // namespace

void validate(const FeatureConfig& config) {
    if (!(config.entropy_threshold_eps > 0.0)) throw ConfigError("features entropy_threshold_eps must be > 0");
    if (!(config.norm_p >= 1.0 && config.norm_p < 2.0)) throw ConfigError("features norm_p must lie in [1, 2)");
    if (config.apen_m < 1) throw ConfigError("features apen_m must be >= 1");
    if (!(config.apen_r_factor > 0.0)) throw ConfigError("features apen_r_factor must be > 0");
    if (config.apen_max_samples && *config.apen_max_samples < static_cast<std::size_t>(config.apen_m) + 2) {
        throw ConfigError("features apen_max_samples must exceed apen_m + 1");
    }
}

std::string_view measure_name(Measure measure) noexcept {
    switch (measure) {
        case Measure::kStd: return "std";
        case Measure::kMean: return "mean";
        case Measure::kRms: return "rms";
        case Measure::kShannon: return "shannon";
        case Measure::kLogEnergy: return "log_energy";
        case Measure::kThreshold: return "threshold";
        case Measure::kSure: return "sure";
        case Measure::kNorm: return "norm";
        case Measure::kApEn: return "apen";
    }
    return "?";
}

const std::array<std::string, kFeatureCount>& feature_names() {
    static const auto names = [] {
        std::array<std::string, kFeatureCount> out;
        for (std::size_t k = 0; k < kFeatureImfs; ++k) {
            for (std::size_t j = 0; j < kMeasuresPerImf; ++j) {
                out[kMeasuresPerImf * k + j] =
                    "imf" + std::to_string(k + 1) + "_" + std::string(measure_name(static_cast<Measure>(j)));
            }
        }
        return out;
    }();
    return names;
}

double mean(std::span<const double> x) {
    require_non_empty(x, "mean");
    double sum = 0.0;
    for (const double v : x) sum += v;
    return sum / static_cast<double>(x.size());
}

double std_dev(std::span<const double> x) {
    const double mu = mean(x);
    double ss = 0.0;
    for (const double v : x) ss += (v - mu) * (v - mu);
    return std::sqrt(ss / static_cast<double>(x.size()));
}

double rms(std::span<const double> x) {
    require_non_empty(x, "rms");
    double ss = 0.0;
    for (const double v : x) ss += v * v;
    return std::sqrt(ss / static_cast<double>(x.size()));
}

double shannon_entropy(std::span<const double> x) {
    double e = 0.0;
    for (const double v : x) {
        if (v == 0.0) continue;
        const double sq = v * v;
        e -= sq * std::log(sq);
    }
    return e;
}

double log_energy_entropy(std::span<const double> x) {
    double e = 0.0;
    for (const double v : x) {
        if (v == 0.0) continue;
        e += std::log(v * v);
    }
    return e;
}

double threshold_entropy(std::span<const double> x, double eps) {
    std::size_t count = 0;
    for (const double v : x) count += std::abs(v) > eps ? 1 : 0;
    return static_cast<double>(count);
}

double sure_entropy(std::span<const double> x, double eps) {
    const double eps2 = eps * eps;
    std::size_t small = 0;
    double clipped = 0.0;
    for (const double v : x) {
        if (std::abs(v) <= eps) ++small;
        clipped += std::min(v * v, eps2);
    }
    return static_cast<double>(x.size() - small) + clipped;
}

double norm_entropy(std::span<const double> x, double p) {
    double e = 0.0;
    for (const double v : x) e += std::pow(std::abs(v), p);
    return e;
}

double approximate_entropy(std::span<const double> x, int m, double r) {
    if (m < 1) throw DataError("approximate entropy needs m >= 1");
    const auto mm = static_cast<std::size_t>(m);
    const std::size_t n = x.size();
    if (n <= mm + 1) {
        throw DataError("approximate entropy needs more than m + 1 = " + std::to_string(mm + 1) + " samples, got " +
                        std::to_string(n));
    }
    if (!(r > 0.0)) throw DataError("approximate entropy tolerance r must be > 0");

    const std::size_t templates_m = n - mm + 1;  // length-m templates
    const std::size_t templates_m1 = n - mm;     // length-(m+1) templates
    std::vector<std::size_t> count_m(templates_m, 1);
    std::vector<std::size_t> count_m1(templates_m1, 1);

    for (std::size_t i = 0; i < templates_m; ++i) {
        for (std::size_t j = i + 1; j < templates_m; ++j) {
            bool match = true;
            for (std::size_t k = 0; k < mm; ++k) {
                if (std::abs(x[i + k] - x[j + k]) > r) {
                    match = false;
                    break;
                }
            }
            if (!match) continue;
            ++count_m[i];
            ++count_m[j];
            if (j < templates_m1 && std::abs(x[i + mm] - x[j + mm]) <= r) {
                ++count_m1[i];
                ++count_m1[j];
            }
        }
    }

    auto phi = [](const std::vector<std::size_t>& counts) {
        const auto total = static_cast<double>(counts.size());
        double sum = 0.0;
        for (const auto c : counts) sum += std::log(static_cast<double>(c) / total);
        return sum / total;
    };
    return phi(count_m) - phi(count_m1);
}

double approximate_entropy(std::span<const double> x, const FeatureConfig& config) {
    if (config.apen_max_samples && x.size() > *config.apen_max_samples) x = x.first(*config.apen_max_samples);
    const double sigma = std_dev(x);
    if (sigma == 0.0) return 0.0;
    return approximate_entropy(x, config.apen_m, config.apen_r_factor * sigma);
}

std::array<double, kMeasuresPerImf> imf_measures(std::span<const double> imf, const FeatureConfig& config) {
    std::array<double, kMeasuresPerImf> out{};
    out[static_cast<std::size_t>(Measure::kStd)] = std_dev(imf);
    out[static_cast<std::size_t>(Measure::kMean)] = mean(imf);
    out[static_cast<std::size_t>(Measure::kRms)] = rms(imf);
    out[static_cast<std::size_t>(Measure::kShannon)] = shannon_entropy(imf);
    out[static_cast<std::size_t>(Measure::kLogEnergy)] = log_energy_entropy(imf);
    out[static_cast<std::size_t>(Measure::kThreshold)] = threshold_entropy(imf, config.entropy_threshold_eps);
    out[static_cast<std::size_t>(Measure::kSure)] =
        config.sure_enabled ? sure_entropy(imf, config.entropy_threshold_eps) : 0.0;
    out[static_cast<std::size_t>(Measure::kNorm)] = norm_entropy(imf, config.norm_p);
    out[static_cast<std::size_t>(Measure::kApEn)] = approximate_entropy(imf, config);
    return out;
}

FeatureVector extract_features(const ImfDecomposition& dec, const FeatureConfig& config) {
    if (dec.imfs.size() != kFeatureImfs) {
        throw DataError("feature extraction needs exactly " + std::to_string(kFeatureImfs) + " IMFs, got " +
                        std::to_string(dec.imfs.size()));
    }
    FeatureVector fv;
    for (std::size_t k = 0; k < kFeatureImfs; ++k) {
        const auto m = imf_measures(dec.imfs[k], config);
        std::copy(m.begin(), m.end(), fv.values.begin() + static_cast<std::ptrdiff_t>(kMeasuresPerImf * k));
    }
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        ensure(std::isfinite(fv.values[i]), "feature " + feature_names()[i] + " is not finite");
    }
    return fv;
}

void write_feature_table(std::ostream& out, std::span<const FeatureVector> rows) {
    out << kFeatureTableSchema << '\n' << "record_id,offset,label";
    for (const auto& name : feature_names()) out << ',' << name;
    out << '\n';
    for (const auto& row : rows) {
        out << row.record_id << ',' << row.offset << ',' << to_string(row.label);
        for (const double v : row.values) out << ',' << format_double(v);
        out << '\n';
    }
}

std::vector<FeatureVector> read_feature_table(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kFeatureTableSchema) {
        throw DataError("features table: missing or unsupported schema line (expected '" +
                        std::string(kFeatureTableSchema) + "')");
    }
    if (!std::getline(in, line)) throw DataError("features table: missing header row");
    const auto header = split(line, ',');
    if (header.size() != kFeatureCount + 3) throw DataError("features table: header has wrong column count");
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (header[i + 3] != feature_names()[i]) {
            throw DataError("features table: unexpected column '" + std::string(header[i + 3]) + "'");
        }
    }
    std::vector<FeatureVector> rows;
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto where = "features table line " + std::to_string(line_no) + ": ";
        const auto cols = split(line, ',');
        if (cols.size() != kFeatureCount + 3) throw DataError(where + "wrong column count");
        FeatureVector fv;
        fv.record_id = std::string(cols[0]);
        const auto [optr, oec] = std::from_chars(cols[1].data(), cols[1].data() + cols[1].size(), fv.offset);
        if (oec != std::errc() || optr != cols[1].data() + cols[1].size()) throw DataError(where + "bad offset");
        fv.label = parse_label(cols[2]);
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            const auto col = cols[i + 3];
            const auto [ptr, ec] = std::from_chars(col.data(), col.data() + col.size(), fv.values[i]);
            if (ec != std::errc() || ptr != col.data() + col.size()) {
                throw DataError(where + "malformed value '" + std::string(col) + "'");
            }
        }
        rows.push_back(std::move(fv));
    }
    return rows;
}

}  // namespace ecgemd
