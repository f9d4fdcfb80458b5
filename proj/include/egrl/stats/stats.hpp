#pragma once

#include "egrl/rng.hpp"

#include <string>
#include <vector>

namespace egrl::stats {

struct EnaScore {
    double value = 0.0;
    double j = 0.0, j_exp = 0.0, j_ref = 0.0;
};

/// Expert-normalized advantage (J - J_exp)/(J_ref - J_exp): 0 at the expert,
/// 1 at the task ceiling. Requires j_ref > j_exp.
EnaScore ena(double j, double j_exp, double j_ref);

/// Interquartile mean: sort, drop floor(n/4) from each tail, average the
/// rest. Requires n >= 4.
double iqm(std::vector<double> values);

struct Interval {
    double lo = 0.0, hi = 0.0;
};

/// Percentile bootstrap CI of the IQM; deterministic given the seed.
Interval bootstrap_ci_iqm(const std::vector<double>& values, int n_resamples = 5000,
                          std::uint64_t seed = 42, double level = 0.95);

struct MwuResult {
    double u = 0.0;  // U statistic of the first sample
    double p = 1.0;  // two-sided
    bool exact = false;
};

/// Mann-Whitney U with midranks. Exact permutation enumeration for combined
/// n <= exact_max_n (default 20); otherwise tie-corrected normal
/// approximation with continuity correction.
MwuResult mann_whitney_two_sided(const std::vector<double>& x, const std::vector<double>& y,
                                 int exact_max_n = 20);

/// Holm-Bonferroni step-down correction; family size is the input length.
std::vector<double> holm_bonferroni(const std::vector<double>& p_values);

enum class Direction { less, greater };

/// One-sided Monte-Carlo permutation test on IQM(a) - IQM(b) with additive
/// +1 smoothing: p = (1 + #extreme) / (1 + n_shuffles).
double permutation_one_sided(const std::vector<double>& a, const std::vector<double>& b,
                             Direction direction, long long n_shuffles, Rng& rng);

/// Exhaustive variant over all C(n, |a|) splits (p = #extreme / #splits,
/// observed split included); for desk-scale oracle checks.
double permutation_one_sided_exact(const std::vector<double>& a, const std::vector<double>& b,
                                   Direction direction);

/// "***" < 0.001, "**" < 0.01, "*" < 0.05, "" otherwise.
std::string significance_marker(double p_corrected);

double normal_cdf(double z);

}  // namespace egrl::stats
