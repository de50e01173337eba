#include "anchoring/abss.hpp"

#include "anchoring/prompt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace anchoring {

namespace {

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

void check_p(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(name) + " outside [0,1]");
}

}  // namespace

void VariationEvidence::validate() const {
    check_p(p_log, "p_log");
    check_p(p_shap, "p_shap");
    check_p(p_wil, "p_wil");
    check_p(p_perm, "p_perm");
    if (!std::isfinite(delta_ev) || !std::isfinite(delta_phi)) throw std::invalid_argument("evidence must be finite");
}

void AbssConstants::validate() const {
    for (double x : {alpha, beta, lambda_conc, weight_denominator}) {
        if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("ABSS constants must be positive");
    }
}

double weight(double p, double denominator) {
    check_p(p, "p");
    if (p == 0.0) return 1.0;
    return std::clamp(-std::log10(p) / denominator, 0.0, 1.0);
}

double behavioral_score(double delta_ev) {
    const double scaled = delta_ev / 100.0;
    return sign_of(scaled) * std::fabs(scaled);
}

double attribution_score(double delta_phi) { return sign_of(delta_phi) * std::tanh(std::fabs(delta_phi)); }

int concordance(double s_b, double s_a, double w_log, double w_shap) {
    if (!(w_log > 0.0 && w_shap > 0.0)) return 0;
    const int sb = sign_of(s_b);
    const int sa = sign_of(s_a);
    if (sb == 0 || sa == 0) return 0;
    return sb == sa ? 1 : -1;
}

AbssBreakdown abss_variation(const VariationEvidence& ev, const AbssConstants& k) {
    ev.validate();
    k.validate();
    AbssBreakdown b;
    b.s_b = behavioral_score(ev.delta_ev);
    b.s_a = attribution_score(ev.delta_phi);
    b.w_log = weight(ev.p_log, k.weight_denominator);
    b.w_shap = weight(ev.p_shap, k.weight_denominator);
    b.w_wil = weight(ev.p_wil, k.weight_denominator);
    b.w_perm = weight(ev.p_perm, k.weight_denominator);
    b.rho = 0.5 + 0.5 * (0.5 * (b.w_wil + b.w_perm));
    b.agreement = concordance(b.s_b, b.s_a, b.w_log, b.w_shap);
    b.c = sign_of(b.s_b) * b.agreement;
    b.abss = b.rho * (k.alpha * b.s_b * b.w_log + k.beta * b.s_a * b.w_shap) + k.lambda_conc * b.c;
    return b;
}

std::string_view leaderboard_key_name(LeaderboardKey k) { return k == LeaderboardKey::Mean ? "mean" : "sum"; }

LeaderboardKey leaderboard_key_from_name(std::string_view name) {
    if (name == "mean") return LeaderboardKey::Mean;
    if (name == "sum") return LeaderboardKey::Sum;
    throw ConfigError("unknown leaderboard key '" + std::string(name) + "' (expected mean or sum)");
}

ModelReport aggregate_model(const std::string& label, const std::vector<ScoredVariation>& variations) {
    if (variations.empty()) throw std::invalid_argument("no variations to aggregate for " + label);
    ModelReport r;
    r.label = label;
    double w_log_total = 0.0;
    for (const auto& v : variations) {
        if (v.excluded) throw std::invalid_argument("excluded variation " + v.id + " passed to the aggregate");
        r.sum += v.breakdown.abss;
        w_log_total += v.breakdown.w_log;
        if (v.breakdown.agreement > 0) ++r.concordant;
    }
    r.n_variations = static_cast<int>(variations.size());
    r.mean = r.sum / r.n_variations;
    r.mean_w_log = w_log_total / r.n_variations;
    return r;
}

std::vector<ModelReport> rank_models(std::vector<ModelReport> models, LeaderboardKey key) {
    auto value = [key](const ModelReport& m) { return key == LeaderboardKey::Mean ? m.mean : m.sum; };
    std::sort(models.begin(), models.end(), [&](const ModelReport& a, const ModelReport& b) {
        if (value(a) != value(b)) return value(a) > value(b);
        if (a.concordant != b.concordant) return a.concordant > b.concordant;
        if (a.mean_w_log != b.mean_w_log) return a.mean_w_log > b.mean_w_log;
        return a.label < b.label;
    });
    for (std::size_t i = 0; i < models.size(); ++i) models[i].rank = static_cast<int>(i) + 1;
    return models;
}

}  // namespace anchoring
