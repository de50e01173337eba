#include "anchoring/stats.hpp"

#include "anchoring/rng.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace anchoring {

namespace {

double kahan_sum(std::span<const double> xs) {
    double sum = 0.0;
    double comp = 0.0;
    for (double x : xs) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

// Relative slack for |S*| >= |S| so that sign patterns reproducing the observed
// magnitude count as ties despite rounding in the summation order.
double tie_slack(std::span<const double> d) {
    double scale = 0.0;
    for (double x : d) scale += std::fabs(x);
    return scale * 1e-12;
}

}  // namespace

std::vector<double> paired_diffs(const LogProbVector& high, const LogProbVector& low) {
    std::vector<double> d(kTargetCount);
    for (int i = 0; i < kTargetCount; ++i) d[i] = high[i] - low[i];
    return d;
}

std::string_view method_name(TestMethod m) {
    switch (m) {
        case TestMethod::T: return "t";
        case TestMethod::Wilcoxon: return "wilcoxon";
        case TestMethod::Permutation: return "permutation";
    }
    return "?";
}

TestResult paired_t_test(std::span<const double> d) {
    const auto n = static_cast<int>(d.size());
    if (n < 2) throw std::invalid_argument("t-test needs at least 2 differences");
    for (double x : d) {
        if (!std::isfinite(x)) throw std::invalid_argument("t-test input must be finite");
    }

    TestResult r;
    r.method = TestMethod::T;
    r.n_effective = n;

    const double mean = kahan_sum(d) / n;
    const bool constant = std::all_of(d.begin(), d.end(), [&](double x) { return x == d[0]; });
    if (constant) {
        if (d[0] == 0.0) return r;  // statistic 0, p 1
        r.degenerate = true;
        r.statistic = std::copysign(std::numeric_limits<double>::infinity(), d[0]);
        r.p_value = 0.0;
        return r;
    }

    double ss = 0.0;
    for (double x : d) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1));
    r.statistic = mean / (sd / std::sqrt(static_cast<double>(n)));

    const boost::math::students_t dist(n - 1);
    r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.statistic))));
    return r;
}

std::vector<double> abs_midranks(std::span<const double> d) {
    const std::size_t n = d.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::fabs(d[a]) < std::fabs(d[b]); });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && std::fabs(d[order[j + 1]]) == std::fabs(d[order[i]])) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mid;
        i = j + 1;
    }
    return ranks;
}

TestResult wilcoxon_pratt(std::span<const double> d) {
    for (double x : d) {
        if (!std::isfinite(x)) throw std::invalid_argument("Wilcoxon input must be finite");
    }
    TestResult r;
    r.method = TestMethod::Wilcoxon;

    const auto ranks = abs_midranks(d);
    double w_plus = 0.0;
    double w_minus = 0.0;
    std::vector<double> nonzero_ranks;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] > 0.0) w_plus += ranks[i];
        if (d[i] < 0.0) w_minus += ranks[i];
        if (d[i] != 0.0) nonzero_ranks.push_back(ranks[i]);
    }
    const auto m = static_cast<int>(nonzero_ranks.size());
    r.n_effective = m;
    r.statistic = w_plus - w_minus;
    if (m == 0) return r;

    if (m <= kWilcoxonExactLimit) {
        // Midranks are multiples of 1/2, so 2*rank is an exact integer.
        std::vector<int> twice(nonzero_ranks.size());
        std::transform(nonzero_ranks.begin(), nonzero_ranks.end(), twice.begin(),
                       [](double x) { return static_cast<int>(std::lround(2.0 * x)); });
        const int total = std::accumulate(twice.begin(), twice.end(), 0);
        // counts[s]: number of sign patterns whose doubled positive rank sum is s.
        std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
        counts[0] = 1.0;
        int reach = 0;
        for (int t : twice) {
            for (int s = reach; s >= 0; --s) counts[static_cast<std::size_t>(s + t)] += counts[static_cast<std::size_t>(s)];
            reach += t;
        }
        const int observed = static_cast<int>(std::lround(2.0 * w_plus));
        const int dev = std::abs(2 * observed - total);
        double tail = 0.0;
        for (int s = 0; s <= total; ++s) {
            if (std::abs(2 * s - total) >= dev) tail += counts[static_cast<std::size_t>(s)];
        }
        r.exact = true;
        r.p_value = std::min(1.0, tail / std::ldexp(1.0, m));
        return r;
    }

    double mean = 0.0;
    double var = 0.0;
    for (double x : nonzero_ranks) {
        mean += x;
        var += x * x;
    }
    mean *= 0.5;
    var *= 0.25;
    const double dev = std::max(0.0, std::fabs(w_plus - mean) - 0.5);
    const double z = dev / std::sqrt(var);
    r.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return r;
}

TestResult permutation_sign_test(std::span<const double> d, int resamples, std::uint64_t seed) {
    if (resamples < 1) throw std::invalid_argument("permutation count must be >= 1");
    if (d.empty()) throw std::invalid_argument("permutation test needs data");
    for (double x : d) {
        if (!std::isfinite(x)) throw std::invalid_argument("permutation input must be finite");
    }

    double observed = 0.0;
    for (double x : d) observed += x;
    const double threshold = std::fabs(observed) - tie_slack(d);

    long long hits = 0;
    for (int b = 0; b < resamples; ++b) {
        SplitMix64 gen(derive_seed(seed, static_cast<std::uint64_t>(b)));
        std::uint64_t bits = 0;
        double flipped = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (i % 64 == 0) bits = gen.next();
            flipped += (bits & 1U) ? d[i] : -d[i];
            bits >>= 1;
        }
        if (std::fabs(flipped) >= threshold) ++hits;
    }

    TestResult r;
    r.method = TestMethod::Permutation;
    r.n_effective = static_cast<int>(d.size());
    r.statistic = observed / static_cast<double>(d.size());
    r.p_value = static_cast<double>(hits + 1) / (static_cast<double>(resamples) + 1.0);
    return r;
}

TestResult permutation_sign_test_exact(std::span<const double> d) {
    if (d.empty() || d.size() > 20) throw std::invalid_argument("exact sign-flip enumeration supports 1..20 entries");
    double observed = 0.0;
    for (double x : d) observed += x;
    const double threshold = std::fabs(observed) - tie_slack(d);

    const std::uint64_t patterns = 1ULL << d.size();
    std::uint64_t hits = 0;
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
        double flipped = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) flipped += ((mask >> i) & 1U) ? d[i] : -d[i];
        if (std::fabs(flipped) >= threshold) ++hits;
    }

    TestResult r;
    r.method = TestMethod::Permutation;
    r.n_effective = static_cast<int>(d.size());
    r.statistic = observed / static_cast<double>(d.size());
    r.p_value = static_cast<double>(hits) / static_cast<double>(patterns);
    return r;
}

int star_count(double p, const StarThresholds& thresholds) {
    return static_cast<int>(std::count_if(thresholds.levels.begin(), thresholds.levels.end(),
                                          [p](double level) { return p < level; }));
}

DirectionCall direction_call(CallSide side, double gap, double p, const StarThresholds& thresholds) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p-value outside [0,1]");
    DirectionCall call;
    call.side = side;
    call.direction = gap > 0.0 ? 1 : (gap < 0.0 ? -1 : 0);
    call.stars = star_count(p, thresholds);
    call.p_value = p;
    return call;
}

std::string DirectionCall::label() const {
    std::string out(1, side == CallSide::Behavioral ? 'B' : 'A');
    out += direction > 0 ? "+" : (direction < 0 ? "-" : "0");
    out.append(static_cast<std::size_t>(stars), '*');
    return out;
}

}  // namespace anchoring
