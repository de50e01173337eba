#include "anchoring/config.hpp"

#include "anchoring/rng.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <set>

namespace anchoring {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
        if (!ok.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj.at(key).is_string()) throw ConfigError(where + " needs string field '" + key + "'");
    return obj.at(key).get<std::string>();
}

int require_int(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj.at(key).is_number_integer()) {
        throw ConfigError(where + " needs integer field '" + key + "'");
    }
    return obj.at(key).get<int>();
}

Variation variation_from_json(const json& v, std::size_t index) {
    const std::string where = "variations[" + std::to_string(index) + "]";
    check_keys(v, {"id", "regime", "scene", "comparative", "absolute", "anchor_low", "anchor_high",
                   "include_in_aggregate"},
               where);
    Variation out;
    out.id = require_string(v, "id", where);
    out.regime = regime_from_name(require_string(v, "regime", where));
    out.scene = require_string(v, "scene", where);
    out.comparative = require_string(v, "comparative", where);
    out.absolute = require_string(v, "absolute", where);
    out.anchor_low = require_int(v, "anchor_low", where);
    out.anchor_high = require_int(v, "anchor_high", where);
    out.include_in_aggregate = get_or<bool>(v, "include_in_aggregate", out.regime != Regime::Control, where);
    return out;
}

json variation_to_json(const Variation& v) {
    return {{"id", v.id},
            {"regime", regime_name(v.regime)},
            {"scene", v.scene},
            {"comparative", v.comparative},
            {"absolute", v.absolute},
            {"anchor_low", v.anchor_low},
            {"anchor_high", v.anchor_high},
            {"include_in_aggregate", v.include_in_aggregate}};
}

}  // namespace

std::vector<Variation> build_variation_set(const json& doc) {
    std::vector<Variation> out;
    if (!doc.contains("variations") || doc.at("variations") == "default") {
        out = default_variations();
    } else {
        const auto& list = doc.at("variations");
        if (!list.is_array()) throw ConfigError("'variations' must be a list or \"default\"");
        for (std::size_t i = 0; i < list.size(); ++i) out.push_back(variation_from_json(list[i], i));
    }
    validate_variation_set(out);
    return out;
}

json oracle_spec_to_json(const OracleSpec& spec) {
    json offsets = json::object();
    for (Field f : kAllFields) offsets[std::string(field_name(f))] = spec.field_offsets[static_cast<int>(f)];
    json out = {{"base_mode", spec.base_mode},
                {"width", spec.width},
                {"sensitivity", spec.sensitivity},
                {"reference", spec.reference},
                {"field_offsets", offsets},
                {"noise_sd", spec.noise_sd},
                {"noise_seed", spec.noise_seed},
                {"prompt_insensitive", spec.prompt_insensitive}};
    if (spec.base_probs) out["base_probs"] = *spec.base_probs;
    return out;
}

OracleSpec oracle_spec_from_json(const json& doc) {
    const std::string where = "scorer.oracle";
    check_keys(doc, {"base_probs", "base_mode", "width", "sensitivity", "reference", "field_offsets", "noise_sd",
                     "noise_seed", "prompt_insensitive"},
               where);
    OracleSpec spec;
    if (doc.contains("base_probs")) spec.base_probs = get_or<std::vector<double>>(doc, "base_probs", {}, where);
    spec.base_mode = get_or(doc, "base_mode", spec.base_mode, where);
    spec.width = get_or(doc, "width", spec.width, where);
    spec.sensitivity = get_or(doc, "sensitivity", spec.sensitivity, where);
    spec.reference = get_or(doc, "reference", spec.reference, where);
    spec.noise_sd = get_or(doc, "noise_sd", spec.noise_sd, where);
    spec.noise_seed = get_or<std::uint64_t>(doc, "noise_seed", spec.noise_seed, where);
    spec.prompt_insensitive = get_or(doc, "prompt_insensitive", spec.prompt_insensitive, where);
    if (doc.contains("field_offsets")) {
        const auto& offsets = doc.at("field_offsets");
        check_keys(offsets, {"scene", "comparative", "absolute", "anchor"}, where + ".field_offsets");
        for (const auto& [name, value] : offsets.items()) {
            if (!value.is_number()) throw ConfigError(where + ".field_offsets." + name + " must be a number");
            spec.field_offsets[static_cast<int>(field_from_name(name))] = value.get<double>();
        }
    }
    // Constructing validates normalizability.
    SyntheticOracle probe(spec);
    return spec;
}

ExperimentConfig ExperimentConfig::from_json(const json& doc, const std::filesystem::path& base_dir) {
    check_keys(doc, {"schema_version", "model", "scorer", "ablation", "variations", "statistics", "shapley_mode", "abss"},
               "config");
    const int version = get_or(doc, "schema_version", kConfigSchemaVersion, "config");
    if (version != kConfigSchemaVersion) {
        throw ConfigError("unsupported config schema_version " + std::to_string(version));
    }

    ExperimentConfig cfg;
    cfg.model = get_or<std::string>(doc, "model", cfg.model, "config");
    if (cfg.model.empty()) throw ConfigError("model label must be non-empty");

    if (doc.contains("scorer")) {
        const auto& s = doc.at("scorer");
        check_keys(s, {"backend", "url", "url_env", "token_env", "timeout_s", "max_in_flight", "cache_path", "oracle"},
                   "scorer");
        auto& out = cfg.scorer;
        out.backend = get_or(s, "backend", out.backend, "scorer");
        if (out.backend != "oracle" && out.backend != "http") {
            throw ConfigError("scorer.backend must be oracle or http, got '" + out.backend + "'");
        }
        out.url = get_or(s, "url", out.url, "scorer");
        out.url_env = get_or(s, "url_env", out.url_env, "scorer");
        out.token_env = get_or(s, "token_env", out.token_env, "scorer");
        out.timeout_s = get_or(s, "timeout_s", out.timeout_s, "scorer");
        out.max_in_flight = get_or(s, "max_in_flight", out.max_in_flight, "scorer");
        if (out.max_in_flight < 1) throw ConfigError("scorer.max_in_flight must be >= 1");
        if (!(out.timeout_s > 0.0)) throw ConfigError("scorer.timeout_s must be positive");
        out.cache_path = get_or(s, "cache_path", out.cache_path, "scorer");
        if (!out.cache_path.empty() && std::filesystem::path(out.cache_path).is_relative() && !base_dir.empty()) {
            out.cache_path = (base_dir / out.cache_path).lexically_normal().string();
        }
        if (s.contains("oracle")) out.oracle = oracle_spec_from_json(s.at("oracle"));
    }

    cfg.ablation = ablation_from_name(get_or<std::string>(doc, "ablation", "drop-empty", "config"));
    cfg.variations = build_variation_set(doc);

    if (doc.contains("statistics")) {
        const auto& st = doc.at("statistics");
        check_keys(st, {"seed", "band_n", "band_B", "permutations", "thresholds"}, "statistics");
        auto& out = cfg.statistics;
        out.seed = get_or(st, "seed", out.seed, "statistics");
        out.band_draws = get_or(st, "band_n", out.band_draws, "statistics");
        out.band_resamples = get_or(st, "band_B", out.band_resamples, "statistics");
        out.permutations = get_or(st, "permutations", out.permutations, "statistics");
        if (st.contains("thresholds")) {
            const auto levels = get_or<std::vector<double>>(st, "thresholds", {}, "statistics");
            if (levels.size() != 3) throw ConfigError("statistics.thresholds needs three levels");
            for (std::size_t i = 0; i < 3; ++i) {
                if (!(levels[i] > 0.0 && levels[i] < 1.0)) throw ConfigError("thresholds must lie in (0,1)");
                out.thresholds.levels[i] = levels[i];
            }
        }
    }
    if (cfg.statistics.band_draws < 1 || cfg.statistics.band_resamples < 1 || cfg.statistics.permutations < 1) {
        throw ConfigError("band_n, band_B and permutations must be >= 1");
    }

    cfg.shapley_mode = shapley_mode_from_name(get_or<std::string>(doc, "shapley_mode", "subset-mean", "config"));

    if (doc.contains("abss")) {
        const auto& a = doc.at("abss");
        check_keys(a, {"alpha", "beta", "lambda_conc", "weight_denominator", "leaderboard"}, "abss");
        cfg.abss.alpha = get_or(a, "alpha", cfg.abss.alpha, "abss");
        cfg.abss.beta = get_or(a, "beta", cfg.abss.beta, "abss");
        cfg.abss.lambda_conc = get_or(a, "lambda_conc", cfg.abss.lambda_conc, "abss");
        cfg.abss.weight_denominator = get_or(a, "weight_denominator", cfg.abss.weight_denominator, "abss");
        cfg.leaderboard = leaderboard_key_from_name(get_or<std::string>(a, "leaderboard", "mean", "abss"));
    }
    cfg.abss.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return from_json(doc, path.parent_path());
}

json ExperimentConfig::to_json() const {
    json variations_json = json::array();
    for (const auto& v : variations) variations_json.push_back(variation_to_json(v));
    const auto& st = statistics;
    return {{"schema_version", kConfigSchemaVersion},
            {"model", model},
            {"scorer",
             {{"backend", scorer.backend},
              {"url", scorer.url},
              {"url_env", scorer.url_env},
              {"token_env", scorer.token_env},
              {"timeout_s", scorer.timeout_s},
              {"max_in_flight", scorer.max_in_flight},
              {"cache_path", scorer.cache_path},
              {"oracle", oracle_spec_to_json(scorer.oracle)}}},
            {"ablation", ablation_name(ablation)},
            {"variations", variations_json},
            {"statistics",
             {{"seed", st.seed},
              {"band_n", st.band_draws},
              {"band_B", st.band_resamples},
              {"permutations", st.permutations},
              {"thresholds", st.thresholds.levels}}},
            {"shapley_mode", shapley_mode_name(shapley_mode)},
            {"abss",
             {{"alpha", abss.alpha},
              {"beta", abss.beta},
              {"lambda_conc", abss.lambda_conc},
              {"weight_denominator", abss.weight_denominator},
              {"leaderboard", leaderboard_key_name(leaderboard)}}}};
}

std::string ExperimentConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json().dump())));
    return buf;
}

std::unique_ptr<Scorer> make_scorer(const ScorerSettings& settings, const std::string& model_label) {
    if (settings.backend == "oracle") return make_synthetic_oracle(settings.oracle);
    HttpScorerOptions options;
    if (settings.url.empty()) {
        options = http_options_from_env(settings.url_env, settings.token_env);
    } else {
        options.url = settings.url;
        if (const char* token = std::getenv(settings.token_env.c_str())) options.token = token;
    }
    options.timeout_s = settings.timeout_s;
    options.model_label = model_label;
    return std::make_unique<HttpScorer>(std::move(options));
}

}  // namespace anchoring
