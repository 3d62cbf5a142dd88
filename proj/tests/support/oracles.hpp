#pragma once

// Reference implementations used only by tests. Written independently of
// the library code paths they check: long-double accumulation, naive loops,
// exhaustive enumeration.

#include <cstddef>
#include <optional>
#include <vector>

#include "ecgemd/tree.hpp"

namespace ecgemd::testing {

double ref_shannon(const std::vector<double>& x);
double ref_log_energy(const std::vector<double>& x);
double ref_threshold(const std::vector<double>& x, double eps);
double ref_sure(const std::vector<double>& x, double eps);
double ref_norm(const std::vector<double>& x, double p);

/// Textbook O(N^2 m) approximate entropy: every template against every
/// template, distance = max coordinate difference.
double ref_apen(const std::vector<double>& x, int m, double r);

struct RefSplit {
    std::size_t feature;
    double threshold;
    double decrease;
};

/// Exhaustive root-split search: every feature, every midpoint between
/// consecutive distinct values, weighted Gini from scratch. Ties (within
/// 1e-12) resolved to the lowest feature, then lowest threshold. With
/// allow_zero_gain an impure set also accepts splits with no decrease, which
/// is what tree induction does at every impure node.
std::optional<RefSplit> ref_best_split(const std::vector<std::vector<double>>& rows,
                                       const std::vector<ClassLabel>& labels, std::size_t min_leaf = 1,
                                       bool allow_zero_gain = false);

/// 10 log10(|clean|^2 / |noisy - clean|^2).
double snr_db(const std::vector<double>& clean, const std::vector<double>& noisy);

double pearson(const std::vector<double>& a, const std::vector<double>& b, std::size_t begin, std::size_t end);

double rel_l2(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace ecgemd::testing
