#pragma once

#include "anchoring/abss.hpp"
#include "anchoring/distribution.hpp"
#include "anchoring/prompt.hpp"
#include "anchoring/scorer.hpp"
#include "anchoring/shapley.hpp"
#include "anchoring/stats.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace anchoring {

inline constexpr int kConfigSchemaVersion = 1;

struct ScorerSettings {
    std::string backend = "oracle";  // "oracle" | "http"
    std::string url;                 // overrides url_env when set
    std::string url_env = "ANCHORING_SCORER_URL";
    std::string token_env = "ANCHORING_SCORER_TOKEN";
    double timeout_s = 120.0;
    int max_in_flight = 1;
    std::string cache_path;  // empty: in-memory cache only
    OracleSpec oracle;
};

struct StatisticsSettings {
    std::uint64_t seed = 1234;
    int band_draws = kDefaultBandDraws;
    int band_resamples = kDefaultBandResamples;
    int permutations = kDefaultPermutations;
    StarThresholds thresholds;
};

struct ExperimentConfig {
    std::string model = "unnamed-model";
    ScorerSettings scorer;
    AblationPolicy ablation = AblationPolicy::DropEmpty;
    std::vector<Variation> variations = default_variations();
    StatisticsSettings statistics;
    ShapleyMode shapley_mode = ShapleyMode::SubsetMean;
    AbssConstants abss;
    LeaderboardKey leaderboard = LeaderboardKey::Mean;

    /// Parses and validates; throws ConfigError. Relative cache paths resolve against `base_dir`.
    static ExperimentConfig from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
    static ExperimentConfig load(const std::filesystem::path& path);

    /// Normalized document with every default filled in; keys are sorted.
    nlohmann::json to_json() const;
    /// FNV-1a of the normalized document, so it ignores key order and formatting.
    std::string hash() const;
};

/// Variation list of a config document; the built-in list when "variations" is
/// absent or "default". Throws ConfigError on malformed entries or gap violations.
std::vector<Variation> build_variation_set(const nlohmann::json& doc);

nlohmann::json oracle_spec_to_json(const OracleSpec& spec);
OracleSpec oracle_spec_from_json(const nlohmann::json& doc);

/// Backend named by the settings (no cache layer).
std::unique_ptr<Scorer> make_scorer(const ScorerSettings& settings, const std::string& model_label);

}  // namespace anchoring
