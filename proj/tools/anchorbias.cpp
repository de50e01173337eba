// anchorbias: run, report, cache inspection and oracle self-test.
#include "anchoring/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>

namespace {

using namespace anchoring;

struct RunArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> shapley_mode;
    std::optional<int> permutations;
    std::optional<int> band_n;
    std::optional<int> band_b;
    std::string out = "runs/latest";
    bool quiet = false;
};

int cmd_run(const RunArgs& args) {
    auto config = ExperimentConfig::load(args.config);
    if (args.seed) config.statistics.seed = *args.seed;
    if (args.shapley_mode) config.shapley_mode = shapley_mode_from_name(*args.shapley_mode);
    if (args.permutations) config.statistics.permutations = *args.permutations;
    if (args.band_n) config.statistics.band_draws = *args.band_n;
    if (args.band_b) config.statistics.band_resamples = *args.band_b;
    if (config.statistics.permutations < 1 || config.statistics.band_draws < 1 ||
        config.statistics.band_resamples < 1) {
        throw ConfigError("--permutations, --band-n and --band-B must be >= 1");
    }

    auto backend = make_scorer(config.scorer, config.model);
    std::unique_ptr<ScoreCache> cache = config.scorer.cache_path.empty()
                                            ? std::make_unique<ScoreCache>()
                                            : std::make_unique<ScoreCache>(config.scorer.cache_path);
    const auto started = utc_timestamp();
    RunStats stats;
    const auto run = run_experiment(config, *backend, cache.get(), &stats);
    const auto manifest = write_run(run, args.out, started);

    if (!args.quiet) std::cout << format_result_table(run);
    std::cerr << "scores: " << stats.backend_calls << " backend, " << stats.cache_hits << " cached\n";
    std::cerr << "manifest: " << (manifest.directory / "manifest.json").string() << '\n';
    if (manifest.partial) {
        std::cerr << "partial run: some variations failed\n";
        return 3;
    }
    return 0;
}

int cmd_report(const std::vector<std::string>& manifests, const std::string& out,
               const std::optional<std::string>& key_name) {
    std::vector<RunResult> runs;
    for (const auto& path : manifests) {
        const auto manifest = RunManifest::load(path);
        runs.push_back(load_run(manifest));
    }
    if (runs.size() == 1 && out.empty()) {
        const auto dir = std::filesystem::path(manifests.front()).parent_path();
        emit_report(runs.front(), dir.empty() ? "." : dir);
        std::cout << format_result_table(runs.front());
        return 0;
    }
    const auto key = key_name ? leaderboard_key_from_name(*key_name) : runs.front().leaderboard;
    const auto ranked = leaderboard(runs, key);
    const std::filesystem::path dir = out.empty() ? std::filesystem::path(".") : std::filesystem::path(out);
    std::filesystem::create_directories(dir);
    write_leaderboard(ranked, key, dir / "leaderboard.tsv");
    for (const auto& m : ranked) {
        std::printf("%d\t%s\t%s %.4f\n", m.rank, m.label.c_str(), std::string(leaderboard_key_name(key)).c_str(),
                    key == LeaderboardKey::Mean ? m.mean : m.sum);
    }
    return 0;
}

int cmd_cache(const std::string& path) {
    const auto summary = ScoreCache::inspect(path);
    std::printf("records\t%zu\nunique\t%zu\nmalformed\t%zu\n", summary.records, summary.unique_keys,
                summary.malformed_lines);
    for (const auto& [fp, n] : summary.per_fingerprint) std::printf("fingerprint\t%s\t%zu\n", fp.c_str(), n);
    return 0;
}

int cmd_selftest() {
    bool ok = true;
    for (const auto& c : selftest()) {
        std::printf("%s  %s  (%s)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        ok = ok && c.passed;
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anchoring-bias evaluation over teacher-forced log-probabilities"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Score every variation and write a run directory");
    run->add_option("--config", run_args.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", run_args.seed, "Override statistics.seed");
    run->add_option("--shapley-mode", run_args.shapley_mode, "subset-mean | classic")
        ->check(CLI::IsMember({"subset-mean", "classic"}));
    run->add_option("--permutations", run_args.permutations, "Sign-flip resamples");
    run->add_option("--band-n", run_args.band_n, "Draws per simulated mean");
    run->add_option("--band-B", run_args.band_b, "Band resamples");
    run->add_option("--out", run_args.out, "Output directory")->capture_default_str();
    run->add_flag("--quiet", run_args.quiet, "Do not print the result table");

    std::vector<std::string> manifests;
    std::string report_out;
    std::optional<std::string> report_key;
    auto* report = app.add_subcommand("report", "Re-emit tables from stored runs; several manifests build a leaderboard");
    report->add_option("--manifest", manifests, "manifest.json of a run (repeatable)")
        ->required()
        ->check(CLI::ExistingFile);
    report->add_option("--out", report_out, "Leaderboard output directory");
    report->add_option("--key", report_key, "mean | sum")->check(CLI::IsMember({"mean", "sum"}));

    std::string cache_path;
    auto* cache = app.add_subcommand("cache", "Summarize a score cache file");
    cache->add_option("--path", cache_path, "Cache file")->required()->check(CLI::ExistingFile);

    auto* self = app.add_subcommand("selftest", "Oracle-backed end-to-end checks (no network)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(run_args);
        if (*report) return cmd_report(manifests, report_out, report_key);
        if (*cache) return cmd_cache(cache_path);
        if (*self) return cmd_selftest();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
