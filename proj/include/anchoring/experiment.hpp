#pragma once

#include "anchoring/abss.hpp"
#include "anchoring/config.hpp"
#include "anchoring/distribution.hpp"
#include "anchoring/shapley.hpp"
#include "anchoring/stats.hpp"

#include <json.hpp>

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace anchoring {

inline constexpr int kReportSchemaVersion = 1;

/// Everything computed for one anchor condition of one variation.
struct ConditionResult {
    AnchorCondition condition = AnchorCondition::Low;
    int anchor = 0;
    std::string prompt;
    LogProbVector logprobs{};
    std::array<double, kTargetCount> probs{};
    double soft_ev = 0.0;
    PredictiveBand band;
    /// payoffs[target][subset mask]
    std::vector<std::array<double, kSubsetCount>> payoffs;
    /// phi[mode][target][field], mode 0 = subset-mean, 1 = classic
    std::array<std::vector<std::array<double, kFieldCount>>, 2> phi;
};

struct VariationResult {
    std::string id;
    Regime regime = Regime::Standard;
    bool excluded = false;
    bool ok = false;
    std::string error;
    std::uint64_t band_seed_low = 0;
    std::uint64_t band_seed_high = 0;
    std::uint64_t permutation_seed = 0;

    std::array<ConditionResult, 2> conditions;  // [low, high]
    double delta_ev = 0.0;
    TestResult t_test;
    TestResult wilcoxon;
    TestResult permutation;
    DirectionCall b_call;
    int w_stars = 0;
    int p_stars = 0;
    std::array<AttributionShift, 2> shift;  // per mode
    DirectionCall a_call;  // from the configured mode
    VariationEvidence evidence;
    AbssBreakdown breakdown;
};

struct RunResult {
    std::string model;
    std::string config_hash;
    nlohmann::json config;
    std::string scorer_fingerprint;
    std::uint64_t seed = 0;
    ShapleyMode shapley_mode = ShapleyMode::SubsetMean;
    LeaderboardKey leaderboard = LeaderboardKey::Mean;
    StarThresholds thresholds;
    std::vector<std::string> assumptions;
    std::vector<VariationResult> variations;
    std::optional<ModelReport> model_report;

    bool partial() const;
    /// Completed, non-excluded variations in run order.
    std::vector<ScoredVariation> aggregate_input() const;
};

struct RunStats {
    std::size_t backend_calls = 0;
    std::size_t cache_hits = 0;
};

/// Runs the full pipeline for every variation. A scorer failure marks that variation
/// failed and the run continues; config errors throw before any scoring.
RunResult run_experiment(const ExperimentConfig& config, Scorer& scorer, ScoreCache* cache = nullptr,
                         RunStats* stats = nullptr);

/// Per-variation computation, exposed for the bindings and tests.
VariationResult run_variation(const ExperimentConfig& config, const Variation& variation, Scorer& scorer);

nlohmann::json run_result_to_json(const RunResult& run);
RunResult run_result_from_json(const nlohmann::json& doc);

struct RunManifest {
    int schema_version = kReportSchemaVersion;
    std::string config_hash;
    std::string scorer_fingerprint;
    std::string model;
    std::uint64_t seed = 0;
    std::string started_at;
    std::string finished_at;
    bool partial = false;
    std::filesystem::path directory;
    std::vector<std::string> artifacts;  // relative to directory
    std::vector<std::string> assumptions;

    nlohmann::json to_json() const;
    static RunManifest load(const std::filesystem::path& path);
};

/// Writes the tables and plot data of a run into `out_dir`; returns the file names
/// written (relative). Everything is derived from the stored result, nothing is
/// recomputed.
std::vector<std::string> emit_report(const RunResult& run, const std::filesystem::path& out_dir);

/// Stores results.json, emits the report files and writes manifest.json.
RunManifest write_run(const RunResult& run, const std::filesystem::path& out_dir, const std::string& started_at);

/// Re-reads the stored result referenced by a manifest.
RunResult load_run(const RunManifest& manifest);

/// Leaderboard across several runs (one per model).
std::vector<ModelReport> leaderboard(const std::vector<RunResult>& runs, LeaderboardKey key);
void write_leaderboard(const std::vector<ModelReport>& ranked, LeaderboardKey key, const std::filesystem::path& path);

/// Result table as aligned text (the shape of the per-model result listings).
std::string format_result_table(const RunResult& run);

std::string utc_timestamp();

struct SelftestCase {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Oracle-backed end-to-end checks: a detectable anchor shift and a null oracle.
std::vector<SelftestCase> selftest();

}  // namespace anchoring
