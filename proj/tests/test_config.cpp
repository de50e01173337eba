#include "anchoring/config.hpp"

#include <doctest.h>

using namespace anchoring;
using nlohmann::json;

TEST_SUITE("config") {
    TEST_CASE("defaults") {
        const auto cfg = ExperimentConfig::from_json(json::object());
        CHECK(cfg.variations.size() == 11);
        CHECK(cfg.statistics.band_draws == 100);
        CHECK(cfg.statistics.band_resamples == 5000);
        CHECK(cfg.statistics.permutations == 10000);
        CHECK(cfg.shapley_mode == ShapleyMode::SubsetMean);
        CHECK(cfg.leaderboard == LeaderboardKey::Mean);
        CHECK(cfg.ablation == AblationPolicy::DropEmpty);
        CHECK(cfg.abss.lambda_conc == 0.15);
    }

    TEST_CASE("hash is stable under key order and formatting") {
        const auto a = json::parse(R"({"model":"m","statistics":{"seed":7,"band_n":50},"shapley_mode":"classic"})");
        const auto b = json::parse(R"({"shapley_mode":"classic","statistics":{"band_n":50,"seed":7},"model":"m"})");
        CHECK(ExperimentConfig::from_json(a).hash() == ExperimentConfig::from_json(b).hash());
        const auto c = json::parse(R"({"model":"m","statistics":{"seed":8,"band_n":50},"shapley_mode":"classic"})");
        CHECK(ExperimentConfig::from_json(a).hash() != ExperimentConfig::from_json(c).hash());
        // Explicit defaults hash like omitted ones.
        CHECK(ExperimentConfig::from_json(json::parse(R"({"variations":"default"})")).hash() ==
              ExperimentConfig::from_json(json::object()).hash());
    }

    TEST_CASE("round trip through the normalized document") {
        const auto cfg = ExperimentConfig::from_json(
            json::parse(R"({"model":"m","scorer":{"oracle":{"sensitivity":0.5,"field_offsets":{"scene":-1}}}})"));
        const auto again = ExperimentConfig::from_json(cfg.to_json());
        CHECK(again.hash() == cfg.hash());
        CHECK(again.scorer.oracle.field_offsets[0] == -1.0);
    }

    TEST_CASE("rejections") {
        auto bad = [](const char* text) { return ExperimentConfig::from_json(json::parse(text)); };
        CHECK_THROWS_AS(bad(R"({"modle":"x"})"), ConfigError);
        CHECK_THROWS_AS(bad(R"({"schema_version":2})"), ConfigError);
        CHECK_THROWS_AS(bad(R"({"shapley_mode":"owen"})"), ConfigError);
        CHECK_THROWS_AS(bad(R"({"ablation":"mask"})"), ConfigError);
        CHECK_THROWS_AS(bad(R"({"scorer":{"backend":"grpc"}})"), ConfigError);
        CHECK_THROWS_AS(bad(R"({"scorer":{"max_in_flight":0}})"), ConfigError);
        CHECK_THROWS_AS(bad(R"({"scorer":{"oracle":{"width":-1}}})"), ConfigError);
        CHECK_THROWS_AS(bad(R"({"statistics":{"band_B":0}})"), ConfigError);
        CHECK_THROWS_AS(bad(R"({"statistics":{"thresholds":[0.1,0.05]}})"), ConfigError);
        CHECK_THROWS_AS(bad(R"({"abss":{"alpha":-1}})"), ConfigError);
        CHECK_THROWS_AS(bad(R"({"variations":[]})"), ConfigError);
        CHECK_THROWS_AS(bad(R"({"variations":[{"id":"D1","regime":"D","scene":"s ","comparative":"c ",
                                 "absolute":"a?","anchor_low":10,"anchor_high":60}]})"),
                        ConfigError);
        CHECK_THROWS_AS(bad(R"({"variations":[{"id":"S1","regime":"S","scene":"s ","comparative":"c ",
                                 "absolute":"a?","anchor_low":10}]})"),
                        ConfigError);
    }

    TEST_CASE("custom variations and relative cache path") {
        const auto cfg = ExperimentConfig::from_json(
            json::parse(R"({"scorer":{"cache_path":"cache.tsv"},
                            "variations":[{"id":"V0","regime":"control","scene":"s ","comparative":"c ",
                                           "absolute":"a?","anchor_low":10,"anchor_high":65}]})"),
            "/data/configs");
        REQUIRE(cfg.variations.size() == 1);
        CHECK_FALSE(cfg.variations[0].include_in_aggregate);
        CHECK(cfg.scorer.cache_path == "/data/configs/cache.tsv");
    }

    TEST_CASE("scorer factory") {
        ScorerSettings s;
        CHECK(make_scorer(s, "m")->fingerprint().rfind("oracle/v1:", 0) == 0);
        s.backend = "http";
        s.url = "http://127.0.0.1:9/score";
        CHECK(make_scorer(s, "m")->fingerprint() == "http/v1:m@http://127.0.0.1:9/score");
    }
}
