// Independent reference computations for the tests. Nothing here calls into the
// library's numerical code; each oracle uses the most literal definition available.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

/// Classic Shapley value by averaging marginal contributions over all 4! field orders.
inline double shapley_permutations(const std::array<double, 16>& v, int field) {
    std::array<int, 4> order{0, 1, 2, 3};
    double total = 0.0;
    int count = 0;
    do {
        int mask = 0;
        for (int f : order) {
            if (f == field) {
                total += v[mask | (1 << f)] - v[mask];
                break;
            }
            mask |= 1 << f;
        }
        ++count;
    } while (std::next_permutation(order.begin(), order.end()));
    return total / count;
}

/// Literal subset-mean attribution: mean of v(S u {f}) - v(S) over the 8 sets S without f.
inline double shapley_subset_mean(const std::array<double, 16>& v, int field) {
    double total = 0.0;
    for (int mask = 0; mask < 16; ++mask) {
        if (mask & (1 << field)) continue;
        total += v[mask | (1 << field)] - v[mask];
    }
    return total / 8.0;
}

/// Midranks of |d| computed by counting (O(n^2)), independent of any sort-based ranking.
inline std::vector<double> count_midranks(const std::vector<double>& d) {
    std::vector<double> r(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        double less = 0, equal = 0;
        for (double x : d) {
            if (std::fabs(x) < std::fabs(d[i])) ++less;
            if (std::fabs(x) == std::fabs(d[i])) ++equal;
        }
        r[i] = less + (equal + 1.0) / 2.0;
    }
    return r;
}

/// Two-sided Wilcoxon-Pratt p by enumerating all 2^m sign assignments of the nonzero entries.
inline double wilcoxon_enumeration_p(const std::vector<double>& d) {
    const auto r = count_midranks(d);
    std::vector<double> ranks;
    double observed = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] == 0.0) continue;
        ranks.push_back(r[i]);
        observed += d[i] > 0 ? r[i] : -r[i];
    }
    const std::size_t m = ranks.size();
    if (m == 0) return 1.0;
    std::uint64_t hits = 0;
    const std::uint64_t total = std::uint64_t{1} << m;
    for (std::uint64_t s = 0; s < total; ++s) {
        double stat = 0.0;
        for (std::size_t k = 0; k < m; ++k) stat += (s >> k & 1) ? ranks[k] : -ranks[k];
        if (std::fabs(stat) >= std::fabs(observed) - 1e-9) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

/// Sign-flip p for |d| all equal to a common value: the test statistic is the number
/// of positive signs, so the null is Binomial(n, 1/2).
inline double sign_flip_binomial_p(int n, int positives) {
    const int observed = std::abs(2 * positives - n);
    double p = 0.0;
    for (int k = 0; k <= n; ++k) {
        if (std::abs(2 * k - n) >= observed) {
            p += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - n * std::log(2.0));
        }
    }
    return p;
}

/// Student t density.
inline double t_density(double x, double nu) {
    const double c = std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2) - 0.5 * std::log(nu * M_PI);
    return std::exp(c - (nu + 1) / 2 * std::log1p(x * x / nu));
}

/// Two-sided tail P(|T| >= |t|) by composite Simpson quadrature of the density over
/// [0, |t|] after the substitution-free split P = 1 - 2 * integral.
inline double t_two_sided_p(double t, double nu) {
    const double a = std::fabs(t);
    if (a == 0.0) return 1.0;
    // Integrate the central mass on [0, a] with a fine grid; the tail is what remains.
    const int n = 200000;
    const double h = a / n;
    double s = t_density(0, nu) + t_density(a, nu);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * t_density(i * h, nu);
    const double central = s * h / 3.0;
    return std::max(0.0, 1.0 - 2.0 * central);
}

/// Textbook one-sample t-test p.
inline double t_test_p(const std::vector<double>& d) {
    const double n = static_cast<double>(d.size());
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : d) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1));
    return t_two_sided_p(mean / (sd / std::sqrt(n)), n - 1);
}

/// Predictive band by plain simulation with a different generator and sampler.
inline std::pair<double, double> simulated_band(const std::vector<double>& probs, int draws, int resamples,
                                                std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::discrete_distribution<int> pick(probs.begin(), probs.end());
    std::vector<double> means(static_cast<std::size_t>(resamples));
    for (auto& m : means) {
        double s = 0.0;
        for (int k = 0; k < draws; ++k) s += pick(gen);
        m = s / draws;
    }
    std::sort(means.begin(), means.end());
    auto rank = [&](double q) {
        const auto idx = static_cast<std::size_t>(std::ceil(q * resamples));
        return means[std::max<std::size_t>(idx, 1) - 1];
    };
    return {rank(0.025), rank(0.975)};
}

/// tanh from its exponential definition evaluated in long double.
inline double tanh_exp(double x) {
    const long double e = std::exp(2.0L * x);
    return static_cast<double>((e - 1.0L) / (e + 1.0L));
}

}  // namespace oracle
