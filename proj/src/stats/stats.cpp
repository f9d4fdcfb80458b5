#include "egrl/stats/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace egrl::stats {

EnaScore ena(double j, double j_exp, double j_ref) {
    if (!(j_ref > j_exp))
        throw std::invalid_argument("ena: requires j_ref > j_exp");
    return {(j - j_exp) / (j_ref - j_exp), j, j_exp, j_ref};
}

double iqm(std::vector<double> values) {
    const size_t n = values.size();
    if (n < 4) throw std::invalid_argument("iqm: needs at least 4 values");
    for (double v : values)
        if (std::isnan(v)) throw std::invalid_argument("iqm: NaN input");
    std::sort(values.begin(), values.end());
    const size_t k = n / 4;  // drop floor(n/4) from each tail
    double sum = 0.0;
    for (size_t i = k; i < n - k; ++i) sum += values[i];
    return sum / static_cast<double>(n - 2 * k);
}

Interval bootstrap_ci_iqm(const std::vector<double>& values, int n_resamples,
                          std::uint64_t seed, double level) {
    if (values.size() < 4) throw std::invalid_argument("bootstrap_ci_iqm: needs at least 4 values");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("bootstrap_ci_iqm: bad level");
    Rng rng(seed);
    const size_t n = values.size();
    std::vector<double> stats(static_cast<size_t>(n_resamples));
    std::vector<double> resample(n);
    for (int r = 0; r < n_resamples; ++r) {
        for (size_t i = 0; i < n; ++i) resample[i] = values[rng.uniform_int(n)];
        stats[static_cast<size_t>(r)] = iqm(resample);
    }
    std::sort(stats.begin(), stats.end());
    const double alpha = 0.5 * (1.0 - level);
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(stats.size() - 1);
        const size_t lo = static_cast<size_t>(pos);
        const size_t hi = std::min(lo + 1, stats.size() - 1);
        const double w = pos - static_cast<double>(lo);
        return (1.0 - w) * stats[lo] + w * stats[hi];
    };
    return {quantile(alpha), quantile(1.0 - alpha)};
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {

// Midranks of the pooled sample.
std::vector<double> midranks(const std::vector<double>& pooled) {
    const size_t n = pooled.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return pooled[a] < pooled[b]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j < n && pooled[order[j]] == pooled[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j - 1) + 1.0;
        for (size_t k = i; k < j; ++k) ranks[order[k]] = r;
        i = j;
    }
    return ranks;
}

// Visits every C(n, k) index subset.
template <typename Fn>
void for_each_combination(size_t n, size_t k, Fn&& fn) {
    std::vector<size_t> idx(k);
    std::iota(idx.begin(), idx.end(), size_t{0});
    while (true) {
        fn(idx);
        size_t i = k;
        while (i > 0) {
            --i;
            if (idx[i] != i + n - k) break;
            if (i == 0) return;
        }
        if (idx[i] == i + n - k) return;
        ++idx[i];
        for (size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

MwuResult mann_whitney_two_sided(const std::vector<double>& x, const std::vector<double>& y,
                                 int exact_max_n) {
    if (x.empty() || y.empty()) throw std::invalid_argument("mann_whitney: empty sample");
    const size_t n1 = x.size(), n2 = y.size(), n = n1 + n2;
    std::vector<double> pooled(x);
    pooled.insert(pooled.end(), y.begin(), y.end());
    const std::vector<double> ranks = midranks(pooled);

    double r1 = 0.0;
    for (size_t i = 0; i < n1; ++i) r1 += ranks[i];
    const double u = r1 - 0.5 * static_cast<double>(n1) * static_cast<double>(n1 + 1);
    const double mu = 0.5 * static_cast<double>(n1) * static_cast<double>(n2);

    MwuResult res;
    res.u = u;

    if (static_cast<int>(n) <= exact_max_n) {
        res.exact = true;
        const double d_obs = std::abs(u - mu) - 1e-12;
        long long extreme = 0, total = 0;
        for_each_combination(n, n1, [&](const std::vector<size_t>& idx) {
            double rs = 0.0;
            for (size_t i : idx) rs += ranks[i];
            const double us = rs - 0.5 * static_cast<double>(n1) * static_cast<double>(n1 + 1);
            if (std::abs(us - mu) >= d_obs) ++extreme;
            ++total;
        });
        res.p = static_cast<double>(extreme) / static_cast<double>(total);
        return res;
    }

    // Tie-corrected normal approximation with continuity correction.
    double tie_term = 0.0;
    {
        std::vector<double> sorted(pooled);
        std::sort(sorted.begin(), sorted.end());
        size_t i = 0;
        while (i < sorted.size()) {
            size_t j = i;
            while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i);
            tie_term += t * t * t - t;
            i = j;
        }
    }
    const double nf = static_cast<double>(n);
    const double var = (static_cast<double>(n1) * static_cast<double>(n2) / 12.0) *
                       ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    if (var <= 0.0) {
        res.p = 1.0;
        return res;
    }
    const double z = (std::abs(u - mu) - 0.5) / std::sqrt(var);
    res.p = std::min(1.0, 2.0 * (1.0 - normal_cdf(z)));
    return res;
}

std::vector<double> holm_bonferroni(const std::vector<double>& p_values) {
    const size_t m = p_values.size();
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("holm: p outside [0,1]");
    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return p_values[a] < p_values[b]; });
    std::vector<double> corrected(m);
    double running = 0.0;
    for (size_t i = 0; i < m; ++i) {
        const double stepped =
            std::min(1.0, static_cast<double>(m - i) * p_values[order[i]]);
        running = std::max(running, stepped);
        corrected[order[i]] = running;
    }
    return corrected;
}

namespace {

// IQM without the n >= 4 gate (drop floor(n/4) per tail; plain mean below
// n = 4), so permutation arms can be tiny.
double trimmed_mean(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t k = v.size() / 4;
    double sum = 0.0;
    for (size_t i = k; i < v.size() - k; ++i) sum += v[i];
    return sum / static_cast<double>(v.size() - 2 * k);
}

double split_statistic(const std::vector<double>& pooled, const std::vector<size_t>& a_idx) {
    std::vector<char> in_a(pooled.size(), 0);
    for (size_t i : a_idx) in_a[i] = 1;
    std::vector<double> a, b;
    a.reserve(a_idx.size());
    b.reserve(pooled.size() - a_idx.size());
    for (size_t i = 0; i < pooled.size(); ++i) (in_a[i] ? a : b).push_back(pooled[i]);
    return trimmed_mean(a) - trimmed_mean(b);
}

bool extreme(double stat, double obs, Direction dir) {
    const double tol = 1e-12 * std::max(1.0, std::abs(obs));
    return dir == Direction::less ? stat <= obs + tol : stat >= obs - tol;
}

}  // namespace

double permutation_one_sided(const std::vector<double>& a, const std::vector<double>& b,
                             Direction direction, long long n_shuffles, Rng& rng) {
    if (a.empty() || b.empty()) throw std::invalid_argument("permutation test: empty arm");
    if (n_shuffles <= 0) throw std::invalid_argument("permutation test: n_shuffles must be > 0");
    const double obs = trimmed_mean(a) - trimmed_mean(b);
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    const size_t n = pooled.size(), n1 = a.size();

    long long count = 0;
    std::vector<double> work(pooled);
    for (long long s = 0; s < n_shuffles; ++s) {
        // Partial Fisher-Yates: the first n1 entries become arm a.
        for (size_t i = 0; i < n1; ++i) {
            const size_t j = i + static_cast<size_t>(rng.uniform_int(n - i));
            std::swap(work[i], work[j]);
        }
        std::vector<double> pa(work.begin(), work.begin() + static_cast<long>(n1));
        std::vector<double> pb(work.begin() + static_cast<long>(n1), work.end());
        if (extreme(trimmed_mean(pa) - trimmed_mean(pb), obs, direction)) ++count;
    }
    return static_cast<double>(1 + count) / static_cast<double>(1 + n_shuffles);
}

double permutation_one_sided_exact(const std::vector<double>& a, const std::vector<double>& b,
                                   Direction direction) {
    if (a.empty() || b.empty()) throw std::invalid_argument("permutation test: empty arm");
    const double obs = trimmed_mean(a) - trimmed_mean(b);
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    long long count = 0, total = 0;
    for_each_combination(pooled.size(), a.size(), [&](const std::vector<size_t>& idx) {
        if (extreme(split_statistic(pooled, idx), obs, direction)) ++count;
        ++total;
    });
    return static_cast<double>(count) / static_cast<double>(total);
}

std::string significance_marker(double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

}  // namespace egrl::stats
