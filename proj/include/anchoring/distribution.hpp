#pragma once

#include "anchoring/scorer.hpp"

#include <array>
#include <cstdint>
#include <span>

namespace anchoring {

/// Probabilities over the target grid 0..100.
class CategoricalDistribution {
public:
    /// Uniform over the grid.
    CategoricalDistribution();

    /// Divides by the total; throws std::invalid_argument on negative or non-finite
    /// entries, a zero total, or a length other than 101.
    static CategoricalDistribution from_probs(std::span<const double> probs);

    /// Point mass at target k.
    static CategoricalDistribution point_mass(int k);

    double operator[](int i) const { return probs_[static_cast<std::size_t>(i)]; }
    const std::array<double, kTargetCount>& probs() const { return probs_; }

private:
    std::array<double, kTargetCount> probs_{};
};

/// Stable log-sum-exp of the entries.
double logsumexp(std::span<const double> values);

/// p_i = exp(l_i - logsumexp(l)); throws std::invalid_argument on non-finite input.
CategoricalDistribution normalize(const LogProbVector& logs);

/// Expected target value, sum_i i * p_i.
double soft_ev(const CategoricalDistribution& dist);

struct PredictiveBand {
    double lo = 0.0;
    double hi = 0.0;
    int n_draws = 0;
    int n_resamples = 0;
    std::uint64_t seed = 0;
};

inline constexpr int kDefaultBandDraws = 100;
inline constexpr int kDefaultBandResamples = 5000;

/// 2.5%/97.5% nearest-rank percentiles of `resamples` means of `draws` iid draws
/// from `dist`. Resample b draws from the stream derive_seed(seed, b), so the band
/// does not depend on evaluation order.
PredictiveBand predictive_band(const CategoricalDistribution& dist, int draws = kDefaultBandDraws,
                               int resamples = kDefaultBandResamples, std::uint64_t seed = 0);

/// Nearest-rank percentile of sorted data, percentile given in per-mille (25 = 2.5%).
double nearest_rank(std::span<const double> sorted, int per_mille);

}  // namespace anchoring
