#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ecgemd::testing {

double ref_shannon(const std::vector<double>& x) {
    long double e = 0;
    for (const double v : x) {
        if (v != 0) e += -static_cast<long double>(v) * v * std::log(static_cast<long double>(v) * v);
    }
    return static_cast<double>(e);
}

double ref_log_energy(const std::vector<double>& x) {
    long double e = 0;
    for (const double v : x) {
        if (v != 0) e += 2.0L * std::log(std::fabs(static_cast<long double>(v)));
    }
    return static_cast<double>(e);
}

double ref_threshold(const std::vector<double>& x, double eps) {
    return static_cast<double>(std::count_if(x.begin(), x.end(), [&](double v) { return v > eps || v < -eps; }));
}

double ref_sure(const std::vector<double>& x, double eps) {
    long double e = static_cast<long double>(x.size());
    for (const double v : x) {
        if (std::fabs(v) <= eps) {
            e -= 1;
            e += static_cast<long double>(v) * v;
        } else {
            e += static_cast<long double>(eps) * eps;
        }
    }
    return static_cast<double>(e);
}

double ref_norm(const std::vector<double>& x, double p) {
    long double e = 0;
    for (const double v : x) e += std::pow(std::fabs(static_cast<long double>(v)), static_cast<long double>(p));
    return static_cast<double>(e);
}

double ref_apen(const std::vector<double>& x, int m, double r) {
    const auto n = static_cast<int>(x.size());
    auto phi = [&](int len) {
        const int count = n - len + 1;
        long double total = 0;
        for (int i = 0; i < count; ++i) {
            int matches = 0;
            for (int j = 0; j < count; ++j) {
                double dist = 0;
                for (int k = 0; k < len; ++k) dist = std::max(dist, std::fabs(x[i + k] - x[j + k]));
                if (dist <= r) ++matches;
            }
            total += std::log(static_cast<long double>(matches) / count);
        }
        return total / count;
    };
    return static_cast<double>(phi(m) - phi(m + 1));
}

std::optional<RefSplit> ref_best_split(const std::vector<std::vector<double>>& rows,
                                       const std::vector<ClassLabel>& labels, std::size_t min_leaf,
                                       bool allow_zero_gain) {
    const std::size_t n = rows.size();
    if (n == 0) return std::nullopt;
    auto gini_of = [&](const std::vector<std::size_t>& idx) {
        if (idx.empty()) return 0.0L;
        long double hpt = 0;
        for (const auto i : idx) hpt += labels[i] == ClassLabel::kHpt ? 1 : 0;
        const long double p = hpt / idx.size();
        return 1.0L - p * p - (1 - p) * (1 - p);
    };
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    const long double parent = gini_of(all);
    if (parent <= 0) return std::nullopt;
    const double floor = allow_zero_gain ? -1e-12 : 1e-12;

    std::optional<RefSplit> best;
    for (std::size_t f = 0; f < rows[0].size(); ++f) {
        std::set<double> distinct;
        for (const auto& r : rows) distinct.insert(r[f]);
        std::vector<double> values(distinct.begin(), distinct.end());
        for (std::size_t v = 0; v + 1 < values.size(); ++v) {
            const double t = values[v] + (values[v + 1] - values[v]) / 2;
            std::vector<std::size_t> left;
            std::vector<std::size_t> right;
            for (std::size_t i = 0; i < n; ++i) (rows[i][f] <= t ? left : right).push_back(i);
            if (left.size() < min_leaf || right.size() < min_leaf) continue;
            const long double child =
                (left.size() * gini_of(left) + right.size() * gini_of(right)) / static_cast<long double>(n);
            const double decrease = static_cast<double>(parent - child);
            if (decrease <= floor) continue;
            if (!best || decrease > best->decrease + 1e-12) best = RefSplit{f, t, decrease};
        }
    }
    return best;
}

double snr_db(const std::vector<double>& clean, const std::vector<double>& noisy) {
    double signal = 0;
    double err = 0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        signal += clean[i] * clean[i];
        err += (noisy[i] - clean[i]) * (noisy[i] - clean[i]);
    }
    return 10.0 * std::log10(signal / err);
}

double pearson(const std::vector<double>& a, const std::vector<double>& b, std::size_t begin, std::size_t end) {
    double ma = 0;
    double mb = 0;
    const auto n = static_cast<double>(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0;
    double saa = 0;
    double sbb = 0;
    for (std::size_t i = begin; i < end; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0;
    double den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return den == 0 ? std::sqrt(num) : std::sqrt(num / den);
}

}  // namespace ecgemd::testing
