#pragma once

#include "anchoring/prompt.hpp"

#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace anchoring {

/// Sequence log-probabilities (nats) of the targets "0%".."100%".
using LogProbVector = std::array<double, kTargetCount>;

class ScorerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-2xx status, unreachable server, or a malformed response body.
class TransportError : public ScorerError {
public:
    using ScorerError::ScorerError;
};

/// The backend's echoed tokens do not spell the requested continuation.
class TokenizationMismatch : public ScorerError {
public:
    using ScorerError::ScorerError;
};

class NonFiniteScore : public ScorerError {
public:
    using ScorerError::ScorerError;
};

/// A grid scoring failure, tagged with the target that failed.
class GridScoreError : public ScorerError {
public:
    GridScoreError(int target_index, const std::string& what)
        : ScorerError("target " + std::to_string(target_index) + " (" + std::to_string(target_index) + "%): " + what),
          target_index_(target_index) {}
    int target_index() const { return target_index_; }

private:
    int target_index_;
};

/// Structured origin of a rendered prompt. Text backends ignore it; the synthetic
/// oracle reads the present fields and the anchor value from it.
struct PromptContext {
    FieldSubset subset = FieldSubset::full();
    int anchor = 0;
};

struct ScoreRequest {
    std::string prompt;
    std::string target;
    std::optional<PromptContext> context;

    /// The scored continuation: one space then the target.
    std::string continuation() const { return " " + target; }
    std::string scored_text() const { return prompt + continuation(); }
};

/// Parses "i%" with i in [0,100]; throws std::invalid_argument otherwise.
int parse_target(std::string_view target);

/// log P(target | prompt) contract. Implementations must be safe for concurrent calls.
class Scorer {
public:
    virtual ~Scorer() = default;
    virtual double score(const ScoreRequest& request) = 0;
    /// Identifies the backend and its settings; part of every cache key.
    virtual std::string fingerprint() const = 0;
    /// Persist anything buffered (cache writes). Called after each grid.
    virtual void flush() {}
};

/// Teacher-forced continuation score from per-position log-softmax rows.
/// Row t holds the distribution predicting token t+1, so token t (t >= first) is
/// scored from row t-1. Rows of reduced precision are widened to double first.
template <typename Real>
double teacher_forced_logprob(std::span<const std::vector<Real>> rows, std::span<const int> tokens,
                              std::size_t first_continuation_token) {
    if (first_continuation_token == 0) throw std::invalid_argument("continuation cannot start at position 0");
    if (rows.size() + 1 < tokens.size()) throw std::invalid_argument("fewer logit rows than scored positions");
    double total = 0.0;
    for (std::size_t t = first_continuation_token; t < tokens.size(); ++t) {
        const auto& row = rows[t - 1];
        const auto id = static_cast<std::size_t>(tokens[t]);
        if (id >= row.size()) throw std::out_of_range("token id outside vocabulary row");
        total += static_cast<double>(row[id]);
    }
    return total;
}

/// Sum of sub-token log-probabilities; throws NonFiniteScore on NaN or infinity.
double sum_token_logprobs(std::span<const double> token_logprobs);

// ---------------------------------------------------------------------------
// HTTP backend

inline constexpr int kScorerProtocolVersion = 1;

struct HttpScorerOptions {
    std::string url;       // e.g. http://127.0.0.1:8080/score
    std::string token;     // sent as a bearer token when non-empty
    double timeout_s = 120.0;
    std::string model_label;  // folded into the fingerprint
};

/// Reads the endpoint URL and token from the named environment variables.
HttpScorerOptions http_options_from_env(const std::string& url_var, const std::string& token_var);

/// Client for a log-prob server: POST {prompt, continuation, version} and expect
/// {token_logprobs: [...], tokens: [...]} where the tokens spell the continuation.
class HttpScorer : public Scorer {
public:
    explicit HttpScorer(HttpScorerOptions options);
    double score(const ScoreRequest& request) override;
    std::string fingerprint() const override;

private:
    HttpScorerOptions options_;
    std::string scheme_host_;
    std::string path_;
};

/// Parses a scorer response body and returns the continuation score.
double parse_score_response(std::string_view body, std::string_view continuation);

// ---------------------------------------------------------------------------
// Synthetic oracle

struct OracleSpec {
    /// Explicit base categorical over 0..100 (strictly positive, normalized on
    /// construction). When absent a discretized bell curve is used.
    std::optional<std::vector<double>> base_probs;
    double base_mode = 30.0;
    double width = 15.0;
    /// Bell center under a present anchor: base_mode + sensitivity * (anchor - reference).
    double sensitivity = 0.0;
    double reference = 37.5;
    /// Added to every log-prob when the field is present.
    std::array<double, kFieldCount> field_offsets{};
    /// Gaussian log-prob perturbation, a fixed function of (seed, subset, anchor, target).
    double noise_sd = 0.0;
    std::uint64_t noise_seed = 0;
    /// Ignore the prompt entirely: every request scores log p_base(target).
    bool prompt_insensitive = false;
};

class SyntheticOracle : public Scorer {
public:
    explicit SyntheticOracle(OracleSpec spec);

    double score(const ScoreRequest& request) override;
    std::string fingerprint() const override;

    /// log p over the grid for the given bell center offset (no field offsets, no noise).
    LogProbVector categorical_logprobs(std::optional<int> anchor) const;
    /// Exact score the oracle returns for (subset, anchor, target).
    double value(FieldSubset subset, int anchor, int target) const;
    const OracleSpec& spec() const { return spec_; }

private:
    OracleSpec spec_;
    LogProbVector base_logprobs_{};
};

std::unique_ptr<Scorer> make_synthetic_oracle(const OracleSpec& spec);

// ---------------------------------------------------------------------------
// Cache

struct ScoreCacheKey {
    std::string fingerprint;
    std::uint64_t prompt_hash = 0;
    std::string target;

    static ScoreCacheKey make(const std::string& fingerprint, const ScoreRequest& request);
    std::string serialize() const;
    friend bool operator==(const ScoreCacheKey&, const ScoreCacheKey&) = default;
};

struct CacheSummary {
    std::size_t records = 0;
    std::size_t unique_keys = 0;
    std::size_t malformed_lines = 0;
    std::map<std::string, std::size_t> per_fingerprint;
};

/// Thread-safe score cache, optionally persisted as an append-only text file.
/// Records are "fingerprint \t prompt-hash \t target \t score" lines; later
/// records for the same key win. Pending records are written and fsynced by flush().
class ScoreCache {
public:
    ScoreCache() = default;
    explicit ScoreCache(std::filesystem::path path);
    ~ScoreCache();

    ScoreCache(const ScoreCache&) = delete;
    ScoreCache& operator=(const ScoreCache&) = delete;

    std::optional<double> find(const ScoreCacheKey& key) const;
    void insert(const ScoreCacheKey& key, double score);
    void flush();
    std::size_t size() const;

    static CacheSummary inspect(const std::filesystem::path& path);

private:
    mutable std::mutex mutex_;
    std::unordered_map<std::string, double> entries_;
    std::vector<std::string> pending_;
    std::optional<std::filesystem::path> path_;
};

/// Scorer decorator consulting a ScoreCache before the backend.
class CachedScorer : public Scorer {
public:
    CachedScorer(Scorer& backend, ScoreCache& cache) : backend_(backend), cache_(cache) {}

    double score(const ScoreRequest& request) override;
    std::string fingerprint() const override { return backend_.fingerprint(); }
    void flush() override { cache_.flush(); }

    std::size_t backend_calls() const { return backend_calls_.load(); }
    std::size_t cache_hits() const { return cache_hits_.load(); }

private:
    Scorer& backend_;
    ScoreCache& cache_;
    std::atomic<std::size_t> backend_calls_{0};
    std::atomic<std::size_t> cache_hits_{0};
};

struct GridOptions {
    int max_in_flight = 1;
};

/// Scores "0%".."100%" after `prompt`. Either every entry is filled or the call throws
/// GridScoreError for the lowest failing index.
LogProbVector score_target_grid(Scorer& scorer, const std::string& prompt,
                                std::optional<PromptContext> context = std::nullopt,
                                const GridOptions& options = {});

}  // namespace anchoring
