#include "anchoring/shapley.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace anchoring {

namespace {

// |S|! (n-1-|S|)! / n! for n = 4 and |S| = 0..3.
constexpr std::array<double, kFieldCount> kClassicWeights = {6.0 / 24.0, 2.0 / 24.0, 2.0 / 24.0, 6.0 / 24.0};

}  // namespace

std::string_view shapley_mode_name(ShapleyMode m) {
    return m == ShapleyMode::SubsetMean ? "subset-mean" : "classic";
}

ShapleyMode shapley_mode_from_name(std::string_view name) {
    if (name == "subset-mean") return ShapleyMode::SubsetMean;
    if (name == "classic") return ShapleyMode::Classic;
    throw ConfigError("unknown Shapley mode '" + std::string(name) + "' (expected subset-mean or classic)");
}

double PayoffTable::at(FieldSubset s) const {
    const auto& v = values[s.mask()];
    if (!v) throw IncompleteTableError("payoff table has no entry for " + s.label());
    return *v;
}

bool PayoffTable::complete() const {
    return std::all_of(values.begin(), values.end(), [](const auto& v) { return v && std::isfinite(*v); });
}

double shapley_value(const PayoffTable& table, Field field, ShapleyMode mode) {
    if (!table.complete()) throw IncompleteTableError("payoff table needs 16 finite entries");
    double total = 0.0;
    for (int mask = 0; mask < kSubsetCount; ++mask) {
        const FieldSubset s(static_cast<std::uint8_t>(mask));
        if (s.contains(field)) continue;
        const double marginal = table.at(s.with(field)) - table.at(s);
        total += mode == ShapleyMode::SubsetMean ? marginal : kClassicWeights[static_cast<std::size_t>(s.size())] * marginal;
    }
    return mode == ShapleyMode::SubsetMean ? total / (kSubsetCount / 2) : total;
}

AttributionRecord shapley_anchor(const PayoffTable& table, ShapleyMode mode) {
    return {shapley_value(table, Field::Anchor, mode), mode, table.target, table.condition};
}

std::array<double, kFieldCount> attribution_for_all_fields(const PayoffTable& table, ShapleyMode mode) {
    std::array<double, kFieldCount> out{};
    for (Field f : kAllFields) out[static_cast<std::size_t>(f)] = shapley_value(table, f, mode);
    return out;
}

AttributionShift attribution_shift(const std::vector<AttributionRecord>& high,
                                   const std::vector<AttributionRecord>& low) {
    if (high.size() != low.size() || high.empty()) {
        throw std::invalid_argument("attribution records must cover the same targets");
    }
    auto by_target = [](std::vector<AttributionRecord> recs) {
        std::sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.target < b.target; });
        return recs;
    };
    const auto hi = by_target(high);
    const auto lo = by_target(low);

    std::vector<double> diffs(hi.size());
    double sum_hi = 0.0;
    double sum_lo = 0.0;
    for (std::size_t k = 0; k < hi.size(); ++k) {
        if (hi[k].target != lo[k].target) throw std::invalid_argument("attribution target mismatch");
        if (k > 0 && hi[k].target == hi[k - 1].target) throw std::invalid_argument("duplicate attribution target");
        diffs[k] = hi[k].phi_anchor - lo[k].phi_anchor;
        sum_hi += hi[k].phi_anchor;
        sum_lo += lo[k].phi_anchor;
    }

    AttributionShift shift;
    const auto n = static_cast<double>(hi.size());
    shift.delta_phi = sum_hi / n - sum_lo / n;
    shift.odds_multiplier = odds_multiplier(shift.delta_phi);
    if (diffs.size() >= 2) {
        shift.test = paired_t_test(diffs);
        shift.p_shap = shift.test.p_value;
    }
    return shift;
}

PayoffTable build_payoff_table(const Variation& variation, AnchorCondition condition, int target, Scorer& scorer,
                               AblationPolicy policy) {
    const auto fields = variation.fields(condition);
    PayoffTable table;
    table.target = target;
    table.condition = condition;
    const auto target_text = render_target(target);
    for (int mask = 0; mask < kSubsetCount; ++mask) {
        const FieldSubset s(static_cast<std::uint8_t>(mask));
        const double v = scorer.score({render_prompt(fields, s, policy), target_text, PromptContext{s, fields.anchor}});
        if (!std::isfinite(v)) throw NonFiniteScore("non-finite payoff for " + s.label());
        table.set(s, v);
    }
    scorer.flush();
    return table;
}

std::vector<PayoffTable> build_payoff_tables(const Variation& variation, AnchorCondition condition, Scorer& scorer,
                                             AblationPolicy policy, const GridOptions& grid) {
    const auto fields = variation.fields(condition);
    std::vector<PayoffTable> tables(kTargetCount);
    for (int i = 0; i < kTargetCount; ++i) {
        tables[i].target = i;
        tables[i].condition = condition;
    }
    // Full subset first so a cold run scores the main prompt before its ablations.
    for (int mask = kSubsetCount - 1; mask >= 0; --mask) {
        const FieldSubset s(static_cast<std::uint8_t>(mask));
        const auto logs = score_target_grid(scorer, render_prompt(fields, s, policy), PromptContext{s, fields.anchor}, grid);
        for (int i = 0; i < kTargetCount; ++i) tables[i].set(s, logs[i]);
    }
    return tables;
}

}  // namespace anchoring
