#pragma once

#include "anchoring/prompt.hpp"
#include "anchoring/scorer.hpp"
#include "anchoring/stats.hpp"

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

namespace anchoring {

/// How marginal contributions are averaged.
enum class ShapleyMode : std::uint8_t {
    /// Unweighted mean over the 8 subsets that exclude the field.
    SubsetMean,
    /// Shapley weights |S|! (3-|S|)! / 4!.
    Classic,
};
std::string_view shapley_mode_name(ShapleyMode m);
ShapleyMode shapley_mode_from_name(std::string_view name);

/// v(S) for all 16 field subsets, indexed by subset mask.
struct PayoffTable {
    std::array<std::optional<double>, kSubsetCount> values{};
    int target = 0;
    AnchorCondition condition = AnchorCondition::Low;

    double at(FieldSubset s) const;
    void set(FieldSubset s, double v) { values[s.mask()] = v; }
    bool complete() const;
};

class IncompleteTableError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Attribution of one field for one table; throws IncompleteTableError.
double shapley_value(const PayoffTable& table, Field field, ShapleyMode mode);

struct AttributionRecord {
    double phi_anchor = 0.0;
    ShapleyMode mode = ShapleyMode::SubsetMean;
    int target = 0;
    AnchorCondition condition = AnchorCondition::Low;
};

AttributionRecord shapley_anchor(const PayoffTable& table, ShapleyMode mode = ShapleyMode::SubsetMean);

/// phi for scene, comparative, absolute, anchor (template order).
std::array<double, kFieldCount> attribution_for_all_fields(const PayoffTable& table,
                                                           ShapleyMode mode = ShapleyMode::SubsetMean);

struct AttributionShift {
    double delta_phi = 0.0;
    double odds_multiplier = 1.0;
    double p_shap = 1.0;
    TestResult test;
};

/// mean phi(high) - mean phi(low) and a paired t-test over per-target differences.
/// Records must cover the same targets; they are matched by target index.
AttributionShift attribution_shift(const std::vector<AttributionRecord>& high,
                                   const std::vector<AttributionRecord>& low);

/// Odds ratio implied by a log-prob gap in nats.
inline double odds_multiplier(double delta_nats) { return std::exp(delta_nats); }

/// Scores the 16 subset renders of one (variation, condition, target).
PayoffTable build_payoff_table(const Variation& variation, AnchorCondition condition, int target, Scorer& scorer,
                               AblationPolicy policy = AblationPolicy::DropEmpty);

/// Tables for every target. Scoring goes subset by subset over the whole grid so
/// each rendered prompt is scored as one batch; the full-subset row therefore
/// reproduces score_target_grid on the full prompt.
std::vector<PayoffTable> build_payoff_tables(const Variation& variation, AnchorCondition condition, Scorer& scorer,
                                             AblationPolicy policy = AblationPolicy::DropEmpty,
                                             const GridOptions& grid = {});

}  // namespace anchoring
