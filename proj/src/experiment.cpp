#include "anchoring/experiment.hpp"

#include "anchoring/rng.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <sstream>

namespace anchoring {

namespace {

constexpr std::size_t mode_index(ShapleyMode m) { return m == ShapleyMode::SubsetMean ? 0 : 1; }

std::string short_number(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

std::vector<std::string> assumption_log(const ExperimentConfig& config) {
    return {
        "scored text is prompt + \" \" + target; target log-prob is the sum of its sub-token log-probs",
        "ablation policy " + std::string(ablation_name(config.ablation)) +
            ": absent fields render as empty slots; the anchor field covers both numeral sites",
        "SoftEV band: nearest-rank 2.5/97.5 percentiles of " + std::to_string(config.statistics.band_resamples) +
            " means of " + std::to_string(config.statistics.band_draws) + " draws",
        "B direction from the SoftEV gap; B stars from the paired t-test on log-prob differences (p_log)",
        "W: two-sided Wilcoxon signed-rank, Pratt zeros, exact null up to 12 nonzero differences",
        "P: Rademacher sign-flip test on mean(d), " + std::to_string(config.statistics.permutations) +
            " resamples, p = (1 + hits) / (1 + B)",
        "A-calls and ABSS use Shapley mode " + std::string(shapley_mode_name(config.shapley_mode)) +
            "; both modes are reported",
        "p_shap: two-sided paired t-test over per-target differences phi_high(i) - phi_low(i)",
        "stars at p < " + short_number(config.statistics.thresholds.levels[0]) + ", " +
            short_number(config.statistics.thresholds.levels[1]) + ", " +
            short_number(config.statistics.thresholds.levels[2]),
        "concordance requires strictly positive w(p_log) and w(p_shap)",
        "leaderboard key: " + std::string(leaderboard_key_name(config.leaderboard)) +
            "; ties broken by concordant count, mean w(p_log), then label",
    };
}

ConditionResult run_condition(const ExperimentConfig& config, const Variation& variation, AnchorCondition condition,
                              Scorer& scorer, std::uint64_t band_seed) {
    const GridOptions grid{config.scorer.max_in_flight};
    ConditionResult out;
    out.condition = condition;
    out.anchor = variation.anchor(condition);
    const auto fields = variation.fields(condition);
    out.prompt = render_prompt(fields, FieldSubset::full(), config.ablation);

    out.logprobs = score_target_grid(scorer, out.prompt, PromptContext{FieldSubset::full(), out.anchor}, grid);
    const auto dist = normalize(out.logprobs);
    out.probs = dist.probs();
    out.soft_ev = soft_ev(dist);
    out.band = predictive_band(dist, config.statistics.band_draws, config.statistics.band_resamples, band_seed);

    const auto tables = build_payoff_tables(variation, condition, scorer, config.ablation, grid);
    out.payoffs.resize(kTargetCount);
    for (auto& per_mode : out.phi) per_mode.resize(kTargetCount);
    for (int i = 0; i < kTargetCount; ++i) {
        for (int mask = 0; mask < kSubsetCount; ++mask) out.payoffs[i][mask] = tables[i].at(FieldSubset(mask));
        out.phi[0][i] = attribution_for_all_fields(tables[i], ShapleyMode::SubsetMean);
        out.phi[1][i] = attribution_for_all_fields(tables[i], ShapleyMode::Classic);
    }
    return out;
}

std::vector<AttributionRecord> anchor_records(const ConditionResult& c, ShapleyMode mode) {
    std::vector<AttributionRecord> out;
    out.reserve(kTargetCount);
    for (int i = 0; i < kTargetCount; ++i) {
        out.push_back({c.phi[mode_index(mode)][i][static_cast<int>(Field::Anchor)], mode, i, c.condition});
    }
    return out;
}

}  // namespace

bool RunResult::partial() const {
    return std::any_of(variations.begin(), variations.end(), [](const auto& v) { return !v.ok; });
}

std::vector<ScoredVariation> RunResult::aggregate_input() const {
    std::vector<ScoredVariation> out;
    for (const auto& v : variations) {
        if (v.ok && !v.excluded) out.push_back({v.id, false, v.breakdown});
    }
    return out;
}

VariationResult run_variation(const ExperimentConfig& config, const Variation& variation, Scorer& scorer) {
    VariationResult r;
    r.id = variation.id;
    r.regime = variation.regime;
    r.excluded = !variation.include_in_aggregate;
    const auto id_hash = fnv1a64(variation.id);
    r.band_seed_low = derive_seed(config.statistics.seed, id_hash, 1);
    r.band_seed_high = derive_seed(config.statistics.seed, id_hash, 2);
    r.permutation_seed = derive_seed(config.statistics.seed, id_hash, 3);

    auto& low = r.conditions[0];
    auto& high = r.conditions[1];
    low = run_condition(config, variation, AnchorCondition::Low, scorer, r.band_seed_low);
    high = run_condition(config, variation, AnchorCondition::High, scorer, r.band_seed_high);

    const auto d = paired_diffs(high.logprobs, low.logprobs);
    r.t_test = paired_t_test(d);
    r.wilcoxon = wilcoxon_pratt(d);
    r.permutation = permutation_sign_test(d, config.statistics.permutations, r.permutation_seed);
    r.delta_ev = high.soft_ev - low.soft_ev;

    const auto& thresholds = config.statistics.thresholds;
    r.b_call = direction_call(CallSide::Behavioral, r.delta_ev, r.t_test.p_value, thresholds);
    r.w_stars = star_count(r.wilcoxon.p_value, thresholds);
    r.p_stars = star_count(r.permutation.p_value, thresholds);

    for (ShapleyMode mode : {ShapleyMode::SubsetMean, ShapleyMode::Classic}) {
        r.shift[mode_index(mode)] = attribution_shift(anchor_records(high, mode), anchor_records(low, mode));
    }
    const auto& shift = r.shift[mode_index(config.shapley_mode)];
    r.a_call = direction_call(CallSide::Attributional, shift.delta_phi, shift.p_shap, thresholds);

    r.evidence = {r.delta_ev, shift.delta_phi,       r.t_test.p_value, shift.p_shap,
                  r.wilcoxon.p_value, r.permutation.p_value, r.excluded};
    r.breakdown = abss_variation(r.evidence, config.abss);
    r.ok = true;
    return r;
}

RunResult run_experiment(const ExperimentConfig& config, Scorer& scorer, ScoreCache* cache, RunStats* stats) {
    validate_variation_set(config.variations);
    config.abss.validate();

    ScoreCache local_cache;
    CachedScorer cached(scorer, cache ? *cache : local_cache);

    RunResult run;
    run.model = config.model;
    run.config = config.to_json();
    run.config_hash = config.hash();
    run.scorer_fingerprint = scorer.fingerprint();
    run.seed = config.statistics.seed;
    run.shapley_mode = config.shapley_mode;
    run.leaderboard = config.leaderboard;
    run.thresholds = config.statistics.thresholds;
    run.assumptions = assumption_log(config);

    for (const auto& variation : config.variations) {
        try {
            run.variations.push_back(run_variation(config, variation, cached));
        } catch (const ScorerError& e) {
            VariationResult failed;
            failed.id = variation.id;
            failed.regime = variation.regime;
            failed.excluded = !variation.include_in_aggregate;
            failed.ok = false;
            failed.error = e.what();
            run.variations.push_back(std::move(failed));
        }
    }

    const auto input = run.aggregate_input();
    if (!input.empty()) run.model_report = aggregate_model(run.model, input);
    if (stats) {
        stats->backend_calls = cached.backend_calls();
        stats->cache_hits = cached.cache_hits();
    }
    return run;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<SelftestCase> selftest() {
    std::vector<SelftestCase> cases;
    auto check = [&](std::string name, bool ok, std::string detail) {
        cases.push_back({std::move(name), ok, std::move(detail)});
    };

    ExperimentConfig shifted;
    shifted.model = "selftest-shift";
    shifted.scorer.oracle.sensitivity = 10.0 / 55.0;
    auto oracle = make_synthetic_oracle(shifted.scorer.oracle);
    const auto run = run_experiment(shifted, *oracle);

    bool all_b_plus = true;
    std::ostringstream detail;
    for (const auto& v : run.variations) {
        if (v.excluded) continue;
        const bool ok = v.ok && v.b_call.direction > 0 && v.t_test.p_value < 0.01;
        all_b_plus = all_b_plus && ok;
        if (!ok) detail << v.id << ' ';
    }
    check("shifted oracle: B+ with p_log < 0.01 on every aggregated variation", all_b_plus,
          all_b_plus ? "all variations detected" : "missed: " + detail.str());
    const double shifted_mean = run.model_report ? run.model_report->mean : 0.0;
    check("shifted oracle: model-mean ABSS > 0.2", shifted_mean > 0.2, "mean ABSS " + std::to_string(shifted_mean));

    ExperimentConfig null_cfg;
    null_cfg.model = "selftest-null";
    auto null_oracle = make_synthetic_oracle(null_cfg.scorer.oracle);
    const auto null_run = run_experiment(null_cfg, *null_oracle);
    double worst_ev = 0.0;
    for (const auto& v : null_run.variations) worst_ev = std::max(worst_ev, std::fabs(v.delta_ev));
    check("null oracle: |dEV| < 0.5 on every variation", worst_ev < 0.5, "max |dEV| " + std::to_string(worst_ev));
    const double null_mean = null_run.model_report ? null_run.model_report->mean : 1.0;
    check("null oracle: |model-mean ABSS| < 0.05", std::fabs(null_mean) < 0.05,
          "mean ABSS " + std::to_string(null_mean));
    return cases;
}

}  // namespace anchoring
