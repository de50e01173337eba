#include "anchoring/distribution.hpp"

#include "anchoring/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace anchoring {

CategoricalDistribution::CategoricalDistribution() { probs_.fill(1.0 / kTargetCount); }

CategoricalDistribution CategoricalDistribution::from_probs(std::span<const double> probs) {
    if (probs.size() != kTargetCount) throw std::invalid_argument("distribution needs 101 entries");
    double total = 0.0;
    for (double p : probs) {
        if (!std::isfinite(p) || p < 0.0) throw std::invalid_argument("probabilities must be finite and >= 0");
        total += p;
    }
    if (!(total > 0.0)) throw std::invalid_argument("probabilities sum to zero");
    CategoricalDistribution d;
    for (int i = 0; i < kTargetCount; ++i) d.probs_[i] = probs[i] / total;
    return d;
}

CategoricalDistribution CategoricalDistribution::point_mass(int k) {
    if (k < 0 || k >= kTargetCount) throw std::out_of_range("point mass outside 0..100");
    CategoricalDistribution d;
    d.probs_.fill(0.0);
    d.probs_[static_cast<std::size_t>(k)] = 1.0;
    return d;
}

double logsumexp(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("logsumexp of an empty range");
    const double hi = *std::max_element(values.begin(), values.end());
    double total = 0.0;
    for (double v : values) total += std::exp(v - hi);
    return hi + std::log(total);
}

CategoricalDistribution normalize(const LogProbVector& logs) {
    for (double l : logs) {
        if (!std::isfinite(l)) throw std::invalid_argument("cannot normalize non-finite log-probabilities");
    }
    const double lse = logsumexp(logs);
    std::array<double, kTargetCount> probs{};
    for (int i = 0; i < kTargetCount; ++i) probs[i] = std::exp(logs[i] - lse);
    // from_probs divides out the remaining rounding error of the exponentials.
    return CategoricalDistribution::from_probs(probs);
}

double soft_ev(const CategoricalDistribution& dist) {
    // Summed as 50 + sum_k k (p[50+k] - p[50-k]) so symmetric mass cancels exactly.
    double offset = 0.0;
    for (int k = 1; k <= 50; ++k) offset += k * (dist[50 + k] - dist[50 - k]);
    return std::clamp(50.0 + offset, 0.0, 100.0);
}

double nearest_rank(std::span<const double> sorted, int per_mille) {
    if (sorted.empty()) throw std::invalid_argument("percentile of an empty sample");
    const auto n = static_cast<long long>(sorted.size());
    long long rank = (static_cast<long long>(per_mille) * n + 999) / 1000;
    rank = std::clamp(rank, 1LL, n);
    return sorted[static_cast<std::size_t>(rank - 1)];
}

PredictiveBand predictive_band(const CategoricalDistribution& dist, int draws, int resamples, std::uint64_t seed) {
    if (draws < 1) throw std::invalid_argument("band draws must be >= 1");
    if (resamples < 1) throw std::invalid_argument("band resamples must be >= 1");

    std::array<double, kTargetCount> cdf{};
    double running = 0.0;
    int last_supported = 0;
    for (int i = 0; i < kTargetCount; ++i) {
        running += dist[i];
        cdf[i] = running;
        if (dist[i] > 0.0) last_supported = i;
    }
    for (int i = last_supported; i < kTargetCount; ++i) cdf[i] = 1.0;

    std::vector<double> means(static_cast<std::size_t>(resamples));
    for (int b = 0; b < resamples; ++b) {
        SplitMix64 gen(derive_seed(seed, static_cast<std::uint64_t>(b)));
        long long sum = 0;
        for (int k = 0; k < draws; ++k) {
            const double u = gen.uniform();
            sum += std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        }
        means[static_cast<std::size_t>(b)] = static_cast<double>(sum) / draws;
    }
    std::sort(means.begin(), means.end());
    return {nearest_rank(means, 25), nearest_rank(means, 975), draws, resamples, seed};
}

}  // namespace anchoring
