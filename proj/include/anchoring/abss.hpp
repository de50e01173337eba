#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace anchoring {

struct VariationEvidence {
    double delta_ev = 0.0;   // SoftEV(high) - SoftEV(low), points
    double delta_phi = 0.0;  // mean anchor attribution gap, nats
    double p_log = 1.0;
    double p_shap = 1.0;
    double p_wil = 1.0;
    double p_perm = 1.0;
    bool excluded = false;

    void validate() const;
};

struct AbssConstants {
    double alpha = 1.0;
    double beta = 1.0;
    double lambda_conc = 0.15;
    double weight_denominator = 3.0;

    void validate() const;
};

struct AbssBreakdown {
    double s_b = 0.0;
    double s_a = 0.0;
    double w_log = 0.0;
    double w_shap = 0.0;
    double w_wil = 0.0;
    double w_perm = 0.0;
    double rho = 0.5;
    /// Agreement of the two sides: +1 agree, -1 opposed, 0 without weight or sign.
    int agreement = 0;
    /// Concordance term entering the score: agreement oriented by sign(s_b), so
    /// joint negation of the evidence negates it.
    int c = 0;
    double abss = 0.0;
};

/// clip(-log10(p) / denominator, 0, 1); p = 0 saturates to 1, p outside [0,1] throws.
double weight(double p, double denominator = 3.0);

/// sign(dEV/100) * |dEV/100|, i.e. dEV/100.
double behavioral_score(double delta_ev);

/// sign(dphi) * tanh(|dphi|).
double attribution_score(double delta_phi);

/// +1 when both weights are positive and the nonzero signs agree, -1 when they are
/// opposed, 0 otherwise.
int concordance(double s_b, double s_a, double w_log, double w_shap);

AbssBreakdown abss_variation(const VariationEvidence& evidence, const AbssConstants& k = {});

struct ScoredVariation {
    std::string id;
    bool excluded = false;
    AbssBreakdown breakdown;
};

enum class LeaderboardKey : std::uint8_t { Mean, Sum };
std::string_view leaderboard_key_name(LeaderboardKey k);
LeaderboardKey leaderboard_key_from_name(std::string_view name);

struct ModelReport {
    std::string label;
    int n_variations = 0;
    double sum = 0.0;
    double mean = 0.0;
    int concordant = 0;
    double mean_w_log = 0.0;
    int rank = 0;
};

/// Sum and mean of per-variation ABSS. Throws std::invalid_argument for an empty
/// list or when an excluded variation was not filtered out by the caller.
ModelReport aggregate_model(const std::string& label, const std::vector<ScoredVariation>& variations);

/// Orders by the key (descending), then more concordant variations, then larger mean
/// w(p_log), then label; fills in 1-based ranks.
std::vector<ModelReport> rank_models(std::vector<ModelReport> models, LeaderboardKey key = LeaderboardKey::Mean);

}  // namespace anchoring
