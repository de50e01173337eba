#include "anchoring/experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace anchoring {

using nlohmann::json;

namespace {

// Non-finite values (the degenerate t statistic) are stored as strings.
json num(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

double num_from(const json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
}

/// Shortest round-trip decimal form.
std::string fmt(double x) {
    if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

std::string fixed(double x, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << x;
    return os.str();
}

json test_to_json(const TestResult& t) {
    return {{"statistic", num(t.statistic)}, {"p_value", t.p_value},   {"method", method_name(t.method)},
            {"n_effective", t.n_effective},  {"degenerate", t.degenerate}, {"exact", t.exact}};
}

TestResult test_from_json(const json& j) {
    TestResult t;
    t.statistic = num_from(j.at("statistic"));
    t.p_value = j.at("p_value").get<double>();
    const auto m = j.at("method").get<std::string>();
    t.method = m == "t" ? TestMethod::T : (m == "wilcoxon" ? TestMethod::Wilcoxon : TestMethod::Permutation);
    t.n_effective = j.at("n_effective").get<int>();
    t.degenerate = j.at("degenerate").get<bool>();
    t.exact = j.at("exact").get<bool>();
    return t;
}

json call_to_json(const DirectionCall& c) {
    return {{"label", c.label()}, {"direction", c.direction}, {"stars", c.stars}, {"p_value", c.p_value}};
}

DirectionCall call_from_json(const json& j, CallSide side) {
    DirectionCall c;
    c.side = side;
    c.direction = j.at("direction").get<int>();
    c.stars = j.at("stars").get<int>();
    c.p_value = j.at("p_value").get<double>();
    return c;
}

json shift_to_json(const AttributionShift& s) {
    return {{"delta_phi", s.delta_phi}, {"odds_multiplier", s.odds_multiplier}, {"p_shap", s.p_shap},
            {"test", test_to_json(s.test)}};
}

AttributionShift shift_from_json(const json& j) {
    AttributionShift s;
    s.delta_phi = j.at("delta_phi").get<double>();
    s.odds_multiplier = j.at("odds_multiplier").get<double>();
    s.p_shap = j.at("p_shap").get<double>();
    s.test = test_from_json(j.at("test"));
    return s;
}

json breakdown_to_json(const AbssBreakdown& b) {
    return {{"s_b", b.s_b},       {"s_a", b.s_a},       {"w_log", b.w_log}, {"w_shap", b.w_shap},
            {"w_wil", b.w_wil},   {"w_perm", b.w_perm}, {"rho", b.rho},     {"agreement", b.agreement}, {"c", b.c},
            {"abss", b.abss}};
}

AbssBreakdown breakdown_from_json(const json& j) {
    AbssBreakdown b;
    b.s_b = j.at("s_b").get<double>();
    b.s_a = j.at("s_a").get<double>();
    b.w_log = j.at("w_log").get<double>();
    b.w_shap = j.at("w_shap").get<double>();
    b.w_wil = j.at("w_wil").get<double>();
    b.w_perm = j.at("w_perm").get<double>();
    b.rho = j.at("rho").get<double>();
    b.agreement = j.at("agreement").get<int>();
    b.c = j.at("c").get<int>();
    b.abss = j.at("abss").get<double>();
    return b;
}

json condition_to_json(const ConditionResult& c) {
    json phi = json::object();
    phi["subset-mean"] = c.phi[0];
    phi["classic"] = c.phi[1];
    return {{"condition", condition_name(c.condition)},
            {"anchor", c.anchor},
            {"prompt", c.prompt},
            {"logprobs", c.logprobs},
            {"probs", c.probs},
            {"soft_ev", c.soft_ev},
            {"band",
             {{"lo", c.band.lo},
              {"hi", c.band.hi},
              {"n_draws", c.band.n_draws},
              {"n_resamples", c.band.n_resamples},
              {"seed", c.band.seed}}},
            {"payoffs", c.payoffs},
            {"phi", phi}};
}

ConditionResult condition_from_json(const json& j) {
    ConditionResult c;
    c.condition = j.at("condition") == "low" ? AnchorCondition::Low : AnchorCondition::High;
    c.anchor = j.at("anchor").get<int>();
    c.prompt = j.at("prompt").get<std::string>();
    c.logprobs = j.at("logprobs").get<LogProbVector>();
    c.probs = j.at("probs").get<std::array<double, kTargetCount>>();
    c.soft_ev = j.at("soft_ev").get<double>();
    const auto& b = j.at("band");
    c.band = {b.at("lo").get<double>(), b.at("hi").get<double>(), b.at("n_draws").get<int>(),
              b.at("n_resamples").get<int>(), b.at("seed").get<std::uint64_t>()};
    c.payoffs = j.at("payoffs").get<std::vector<std::array<double, kSubsetCount>>>();
    c.phi[0] = j.at("phi").at("subset-mean").get<std::vector<std::array<double, kFieldCount>>>();
    c.phi[1] = j.at("phi").at("classic").get<std::vector<std::array<double, kFieldCount>>>();
    return c;
}

json variation_to_json(const VariationResult& v) {
    json out = {{"id", v.id},
                {"regime", regime_name(v.regime)},
                {"excluded", v.excluded},
                {"ok", v.ok},
                {"error", v.error},
                {"seeds",
                 {{"band_low", v.band_seed_low}, {"band_high", v.band_seed_high}, {"permutation", v.permutation_seed}}}};
    if (!v.ok) return out;
    out["conditions"] = {condition_to_json(v.conditions[0]), condition_to_json(v.conditions[1])};
    out["delta_ev"] = v.delta_ev;
    out["t_test"] = test_to_json(v.t_test);
    out["wilcoxon"] = test_to_json(v.wilcoxon);
    out["permutation"] = test_to_json(v.permutation);
    out["b_call"] = call_to_json(v.b_call);
    out["w_stars"] = v.w_stars;
    out["p_stars"] = v.p_stars;
    out["shift"] = {{"subset-mean", shift_to_json(v.shift[0])}, {"classic", shift_to_json(v.shift[1])}};
    out["a_call"] = call_to_json(v.a_call);
    const auto& e = v.evidence;
    out["evidence"] = {{"delta_ev", e.delta_ev}, {"delta_phi", e.delta_phi}, {"p_log", e.p_log},
                       {"p_shap", e.p_shap},     {"p_wil", e.p_wil},          {"p_perm", e.p_perm},
                       {"excluded", e.excluded}};
    out["breakdown"] = breakdown_to_json(v.breakdown);
    return out;
}

VariationResult variation_from_json(const json& j) {
    VariationResult v;
    v.id = j.at("id").get<std::string>();
    v.regime = regime_from_name(j.at("regime").get<std::string>());
    v.excluded = j.at("excluded").get<bool>();
    v.ok = j.at("ok").get<bool>();
    v.error = j.at("error").get<std::string>();
    v.band_seed_low = j.at("seeds").at("band_low").get<std::uint64_t>();
    v.band_seed_high = j.at("seeds").at("band_high").get<std::uint64_t>();
    v.permutation_seed = j.at("seeds").at("permutation").get<std::uint64_t>();
    if (!v.ok) return v;
    v.conditions[0] = condition_from_json(j.at("conditions").at(0));
    v.conditions[1] = condition_from_json(j.at("conditions").at(1));
    v.delta_ev = j.at("delta_ev").get<double>();
    v.t_test = test_from_json(j.at("t_test"));
    v.wilcoxon = test_from_json(j.at("wilcoxon"));
    v.permutation = test_from_json(j.at("permutation"));
    v.b_call = call_from_json(j.at("b_call"), CallSide::Behavioral);
    v.w_stars = j.at("w_stars").get<int>();
    v.p_stars = j.at("p_stars").get<int>();
    v.shift[0] = shift_from_json(j.at("shift").at("subset-mean"));
    v.shift[1] = shift_from_json(j.at("shift").at("classic"));
    v.a_call = call_from_json(j.at("a_call"), CallSide::Attributional);
    v.breakdown = breakdown_from_json(j.at("breakdown"));
    const auto& e = j.at("evidence");
    v.evidence = {e.at("delta_ev").get<double>(), e.at("delta_phi").get<double>(), e.at("p_log").get<double>(),
                  e.at("p_shap").get<double>(),   e.at("p_wil").get<double>(),     e.at("p_perm").get<double>(),
                  e.at("excluded").get<bool>()};
    return v;
}

json report_to_json(const ModelReport& r) {
    return {{"label", r.label},           {"n_variations", r.n_variations}, {"sum", r.sum},
            {"mean", r.mean},             {"concordant", r.concordant},     {"mean_w_log", r.mean_w_log},
            {"rank", r.rank}};
}

ModelReport report_from_json(const json& j) {
    ModelReport r;
    r.label = j.at("label").get<std::string>();
    r.n_variations = j.at("n_variations").get<int>();
    r.sum = j.at("sum").get<double>();
    r.mean = j.at("mean").get<double>();
    r.concordant = j.at("concordant").get<int>();
    r.mean_w_log = j.at("mean_w_log").get<double>();
    r.rank = j.at("rank").get<int>();
    return r;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string stars(int n) { return std::string(static_cast<std::size_t>(n), '*'); }

std::size_t mode_slot(ShapleyMode m) { return m == ShapleyMode::SubsetMean ? 0 : 1; }

}  // namespace

json run_result_to_json(const RunResult& run) {
    json variations = json::array();
    for (const auto& v : run.variations) variations.push_back(variation_to_json(v));
    json out = {{"schema_version", kReportSchemaVersion},
                {"model", run.model},
                {"config_hash", run.config_hash},
                {"config", run.config},
                {"scorer_fingerprint", run.scorer_fingerprint},
                {"seed", run.seed},
                {"shapley_mode", shapley_mode_name(run.shapley_mode)},
                {"leaderboard", leaderboard_key_name(run.leaderboard)},
                {"thresholds", run.thresholds.levels},
                {"assumptions", run.assumptions},
                {"partial", run.partial()},
                {"variations", variations}};
    out["model_report"] = run.model_report ? report_to_json(*run.model_report) : json(nullptr);
    return out;
}

RunResult run_result_from_json(const json& doc) {
    if (doc.at("schema_version").get<int>() != kReportSchemaVersion) {
        throw std::runtime_error("unsupported results schema_version");
    }
    RunResult run;
    run.model = doc.at("model").get<std::string>();
    run.config_hash = doc.at("config_hash").get<std::string>();
    run.config = doc.at("config");
    run.scorer_fingerprint = doc.at("scorer_fingerprint").get<std::string>();
    run.seed = doc.at("seed").get<std::uint64_t>();
    run.shapley_mode = shapley_mode_from_name(doc.at("shapley_mode").get<std::string>());
    run.leaderboard = leaderboard_key_from_name(doc.at("leaderboard").get<std::string>());
    run.thresholds.levels = doc.at("thresholds").get<std::array<double, 3>>();
    run.assumptions = doc.at("assumptions").get<std::vector<std::string>>();
    for (const auto& v : doc.at("variations")) run.variations.push_back(variation_from_json(v));
    if (!doc.at("model_report").is_null()) run.model_report = report_from_json(doc.at("model_report"));
    return run;
}

json RunManifest::to_json() const {
    return {{"schema_version", schema_version}, {"config_hash", config_hash}, {"scorer_fingerprint", scorer_fingerprint},
            {"model", model},                   {"seed", seed},               {"started_at", started_at},
            {"finished_at", finished_at},       {"partial", partial},         {"artifacts", artifacts},
            {"assumptions", assumptions}};
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw std::runtime_error("manifest " + path.string() + " is not valid JSON: " + e.what());
    }
    RunManifest m;
    m.schema_version = doc.at("schema_version").get<int>();
    if (m.schema_version != kReportSchemaVersion) throw std::runtime_error("unsupported manifest schema_version");
    m.config_hash = doc.at("config_hash").get<std::string>();
    m.scorer_fingerprint = doc.at("scorer_fingerprint").get<std::string>();
    m.model = doc.at("model").get<std::string>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.started_at = doc.at("started_at").get<std::string>();
    m.finished_at = doc.at("finished_at").get<std::string>();
    m.partial = doc.at("partial").get<bool>();
    m.artifacts = doc.at("artifacts").get<std::vector<std::string>>();
    m.assumptions = doc.at("assumptions").get<std::vector<std::string>>();
    m.directory = path.parent_path();
    return m;
}

std::vector<std::string> emit_report(const RunResult& run, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& text) {
        write_text(out_dir / name, text);
        written.push_back(name);
    };
    const std::size_t selected = mode_slot(run.shapley_mode);

    // SoftEV by anchor with predictive bands: one row per (variation, condition).
    {
        std::ostringstream os;
        os << "variation\tregime\tcondition\tanchor\tsoft_ev\tband_lo\tband_hi\tband_n\tband_B\tstatus\n";
        for (const auto& v : run.variations) {
            for (const auto& c : v.conditions) {
                os << v.id << '\t' << regime_name(v.regime) << '\t' << condition_name(c.condition) << '\t';
                if (v.ok) {
                    os << c.anchor << '\t' << fmt(c.soft_ev) << '\t' << fmt(c.band.lo) << '\t' << fmt(c.band.hi)
                       << '\t' << c.band.n_draws << '\t' << c.band.n_resamples << "\tok\n";
                } else {
                    os << "\t\t\t\t\t\tfailed\n";
                }
            }
        }
        emit("softev.tsv", os.str());
    }

    // Target-level log-probs and normalized probabilities.
    {
        std::ostringstream os;
        os << "variation\tcondition\ttarget\tlogprob\tprob\n";
        for (const auto& v : run.variations) {
            if (!v.ok) continue;
            for (const auto& c : v.conditions) {
                for (int i = 0; i < kTargetCount; ++i) {
                    os << v.id << '\t' << condition_name(c.condition) << '\t' << i << '\t' << fmt(c.logprobs[i])
                       << '\t' << fmt(c.probs[i]) << '\n';
                }
            }
        }
        emit("logprobs.tsv", os.str());
    }

    // Complete 16-subset payoff tables.
    {
        std::ostringstream os;
        os << "variation\tcondition\ttarget\tsubset\tpayoff\n";
        for (const auto& v : run.variations) {
            if (!v.ok) continue;
            for (const auto& c : v.conditions) {
                for (int i = 0; i < kTargetCount; ++i) {
                    for (int mask = 0; mask < kSubsetCount; ++mask) {
                        os << v.id << '\t' << condition_name(c.condition) << '\t' << i << '\t'
                           << FieldSubset(mask).label() << '\t' << fmt(c.payoffs[i][mask]) << '\n';
                    }
                }
            }
        }
        emit("payoffs.tsv", os.str());
    }

    // Per-field attribution distributions, both modes.
    {
        std::ostringstream os;
        os << "variation\ttarget\tcondition\tfield\tmode\tphi\n";
        for (const auto& v : run.variations) {
            if (!v.ok) continue;
            for (ShapleyMode mode : {ShapleyMode::SubsetMean, ShapleyMode::Classic}) {
                for (const auto& c : v.conditions) {
                    for (int i = 0; i < kTargetCount; ++i) {
                        for (Field f : kAllFields) {
                            os << v.id << '\t' << i << '\t' << condition_name(c.condition) << '\t' << field_name(f)
                               << '\t' << shapley_mode_name(mode) << '\t'
                               << fmt(c.phi[mode_slot(mode)][i][static_cast<int>(f)]) << '\n';
                        }
                    }
                }
            }
        }
        emit("attribution.tsv", os.str());
    }

    // Result table: one row per variation.
    {
        std::ostringstream os;
        os << "variation\tregime\tstatus\tdelta_ev\tb_call\tp_log\tw_stars\tp_wil\tp_stars\tp_perm\t"
              "delta_phi\todds\ta_call\tp_shap\tdelta_phi_classic\tp_shap_classic\tabss\texcluded\n";
        for (const auto& v : run.variations) {
            os << v.id << '\t' << regime_name(v.regime) << '\t';
            if (!v.ok) {
                os << "failed" << std::string(14, '\t') << (v.excluded ? "yes" : "no") << '\n';
                continue;
            }
            const auto& s = v.shift[selected];
            const auto& other = v.shift[1 - selected];
            os << "ok\t" << fmt(v.delta_ev) << '\t' << v.b_call.label() << '\t' << fmt(v.t_test.p_value) << '\t'
               << 'W' << stars(v.w_stars) << '\t' << fmt(v.wilcoxon.p_value) << '\t' << 'P' << stars(v.p_stars)
               << '\t' << fmt(v.permutation.p_value) << '\t' << fmt(s.delta_phi) << '\t' << fmt(s.odds_multiplier)
               << '\t' << v.a_call.label() << '\t' << fmt(s.p_shap) << '\t' << fmt(other.delta_phi) << '\t'
               << fmt(other.p_shap) << '\t' << fmt(v.breakdown.abss) << '\t' << (v.excluded ? "yes" : "no") << '\n';
        }
        emit("results_table.tsv", os.str());

        json rows = json::array();
        for (const auto& v : run.variations) {
            json row = {{"variation", v.id}, {"regime", regime_name(v.regime)}, {"status", v.ok ? "ok" : "failed"},
                        {"excluded", v.excluded}};
            if (v.ok) {
                const auto& s = v.shift[selected];
                row["delta_ev"] = v.delta_ev;
                row["b_call"] = v.b_call.label();
                row["p_log"] = v.t_test.p_value;
                row["w_stars"] = v.w_stars;
                row["p_wil"] = v.wilcoxon.p_value;
                row["p_stars"] = v.p_stars;
                row["p_perm"] = v.permutation.p_value;
                row["delta_phi"] = s.delta_phi;
                row["odds_multiplier"] = s.odds_multiplier;
                row["a_call"] = v.a_call.label();
                row["p_shap"] = s.p_shap;
                row["abss"] = v.breakdown.abss;
            } else {
                row["error"] = v.error;
            }
            rows.push_back(std::move(row));
        }
        emit("results_table.json", rows.dump(1) + "\n");
    }

    // Per-variation ABSS breakdown, ranked within the model; excluded rows unranked.
    {
        std::vector<const VariationResult*> ranked;
        for (const auto& v : run.variations) {
            if (v.ok && !v.excluded) ranked.push_back(&v);
        }
        std::stable_sort(ranked.begin(), ranked.end(), [](const auto* a, const auto* b) {
            return a->breakdown.abss > b->breakdown.abss;
        });
        std::map<std::string, int> rank_of;
        for (std::size_t i = 0; i < ranked.size(); ++i) rank_of[ranked[i]->id] = static_cast<int>(i) + 1;

        std::ostringstream os;
        os << "variation\tregime\ts_b\ts_a\tw_log\tw_shap\tw_wil\tw_perm\trho\tagreement\tc\tabss\trank\n";
        for (const auto& v : run.variations) {
            if (!v.ok) continue;
            const auto& b = v.breakdown;
            os << v.id << '\t' << regime_name(v.regime) << '\t' << fmt(b.s_b) << '\t' << fmt(b.s_a) << '\t'
               << fmt(b.w_log) << '\t' << fmt(b.w_shap) << '\t' << fmt(b.w_wil) << '\t' << fmt(b.w_perm) << '\t'
               << fmt(b.rho) << '\t' << b.agreement << '\t' << b.c << '\t' << fmt(b.abss) << '\t';
            if (const auto it = rank_of.find(v.id); it != rank_of.end()) {
                os << it->second;
            } else {
                os << "excluded";
            }
            os << '\n';
        }
        emit("abss_variations.tsv", os.str());
    }

    // Single-model leaderboard from the aggregate input only.
    {
        std::vector<ModelReport> models;
        const auto input = run.aggregate_input();
        if (!input.empty()) models.push_back(aggregate_model(run.model, input));
        const auto ranked = rank_models(models, run.leaderboard);
        write_leaderboard(ranked, run.leaderboard, out_dir / "leaderboard.tsv");
        written.push_back("leaderboard.tsv");
        json records = json::array();
        for (const auto& m : ranked) records.push_back(report_to_json(m));
        emit("leaderboard.json", records.dump(1) + "\n");
    }
    return written;
}

void write_leaderboard(const std::vector<ModelReport>& ranked, LeaderboardKey key, const std::filesystem::path& path) {
    std::ostringstream os;
    os << "rank\tmodel\tkey\tvalue\tmean\tsum\tn_variations\tconcordant\tmean_w_log\n";
    for (const auto& m : ranked) {
        os << m.rank << '\t' << m.label << '\t' << leaderboard_key_name(key) << '\t'
           << fmt(key == LeaderboardKey::Mean ? m.mean : m.sum) << '\t' << fmt(m.mean) << '\t' << fmt(m.sum) << '\t'
           << m.n_variations << '\t' << m.concordant << '\t' << fmt(m.mean_w_log) << '\n';
    }
    write_text(path, os.str());
}

std::vector<ModelReport> leaderboard(const std::vector<RunResult>& runs, LeaderboardKey key) {
    std::vector<ModelReport> models;
    for (const auto& run : runs) {
        const auto input = run.aggregate_input();
        if (!input.empty()) models.push_back(aggregate_model(run.model, input));
    }
    return rank_models(std::move(models), key);
}

RunManifest write_run(const RunResult& run, const std::filesystem::path& out_dir, const std::string& started_at) {
    std::filesystem::create_directories(out_dir);
    RunManifest m;
    m.config_hash = run.config_hash;
    m.scorer_fingerprint = run.scorer_fingerprint;
    m.model = run.model;
    m.seed = run.seed;
    m.started_at = started_at;
    m.partial = run.partial();
    m.directory = out_dir;
    m.assumptions = run.assumptions;

    write_text(out_dir / "results.json", run_result_to_json(run).dump(1) + "\n");
    m.artifacts.push_back("results.json");
    for (auto& name : emit_report(run, out_dir)) m.artifacts.push_back(std::move(name));

    m.finished_at = utc_timestamp();
    write_text(out_dir / "manifest.json", m.to_json().dump(2) + "\n");
    return m;
}

RunResult load_run(const RunManifest& manifest) {
    const auto path = manifest.directory / "results.json";
    json doc;
    try {
        doc = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw std::runtime_error("results " + path.string() + " is not valid JSON: " + e.what());
    }
    auto run = run_result_from_json(doc);
    if (run.config_hash != manifest.config_hash) {
        throw std::runtime_error("results.json does not belong to this manifest (config hash mismatch)");
    }
    return run;
}

std::string format_result_table(const RunResult& run) {
    std::ostringstream os;
    const std::size_t selected = mode_slot(run.shapley_mode);
    os << "model " << run.model << "  (config " << run.config_hash << ", Shapley " << shapley_mode_name(run.shapley_mode)
       << ")\n";
    os << std::left << std::setw(8) << "var" << std::setw(9) << "dEV" << std::setw(9) << "B" << std::setw(6) << "W"
       << std::setw(6) << "P" << std::setw(10) << "dphi" << std::setw(9) << "odds" << std::setw(9) << "A"
       << std::setw(9) << "ABSS" << '\n';
    for (const auto& v : run.variations) {
        os << std::left << std::setw(8) << v.id;
        if (!v.ok) {
            os << "failed: " << v.error << '\n';
            continue;
        }
        const auto& s = v.shift[selected];
        os << std::setw(9) << fixed(v.delta_ev, 2) << std::setw(9) << v.b_call.label() << std::setw(6)
           << ("W" + stars(v.w_stars)) << std::setw(6) << ("P" + stars(v.p_stars)) << std::setw(10)
           << fixed(s.delta_phi, 3) << std::setw(9) << ("x" + fixed(s.odds_multiplier, 2)) << std::setw(9)
           << v.a_call.label() << std::setw(9) << fixed(v.breakdown.abss, 4) << (v.excluded ? "(excluded)" : "")
           << '\n';
    }
    if (run.model_report) {
        os << "ABSS mean " << fixed(run.model_report->mean, 4) << ", sum " << fixed(run.model_report->sum, 4)
           << " over " << run.model_report->n_variations << " variations\n";
    } else {
        os << "no aggregated variations\n";
    }
    return os.str();
}

}  // namespace anchoring
