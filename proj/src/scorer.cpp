#include "anchoring/scorer.hpp"

#include "anchoring/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <thread>

namespace anchoring {

int parse_target(std::string_view target) {
    if (target.size() < 2 || target.back() != '%') {
        throw std::invalid_argument("target '" + std::string(target) + "' is not of the form i%");
    }
    const auto digits = target.substr(0, target.size() - 1);
    if (digits.size() > 1 && digits.front() == '0') {
        throw std::invalid_argument("target '" + std::string(target) + "' has a leading zero");
    }
    int value = -1;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || value < 0 || value > 100) {
        throw std::invalid_argument("target '" + std::string(target) + "' is not of the form i% with i in [0,100]");
    }
    return value;
}

double sum_token_logprobs(std::span<const double> token_logprobs) {
    double total = 0.0;
    for (double lp : token_logprobs) {
        if (!std::isfinite(lp)) throw NonFiniteScore("backend returned a non-finite token log-prob");
        total += lp;
    }
    if (!std::isfinite(total)) throw NonFiniteScore("sequence log-prob overflowed");
    return total;
}

ScoreCacheKey ScoreCacheKey::make(const std::string& fingerprint, const ScoreRequest& request) {
    std::string clean = fingerprint;
    std::replace_if(clean.begin(), clean.end(), [](char c) { return c == '\t' || c == '\n'; }, ' ');
    return {std::move(clean), fnv1a64(request.prompt), request.target};
}

std::string ScoreCacheKey::serialize() const {
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(prompt_hash));
    return fingerprint + '\t' + hash + '\t' + target;
}

LogProbVector score_target_grid(Scorer& scorer, const std::string& prompt, std::optional<PromptContext> context,
                                const GridOptions& options) {
    LogProbVector out{};
    std::array<std::exception_ptr, kTargetCount> errors{};

    auto score_one = [&](int i) {
        try {
            const double s = scorer.score(ScoreRequest{prompt, render_target(i), context});
            if (!std::isfinite(s)) throw NonFiniteScore("non-finite score");
            out[i] = s;
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };

    const int workers = std::clamp(options.max_in_flight, 1, kTargetCount);
    if (workers == 1) {
        for (int i = 0; i < kTargetCount; ++i) score_one(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < kTargetCount; i = next.fetch_add(1)) score_one(i);
            });
        }
    }

    scorer.flush();
    for (int i = 0; i < kTargetCount; ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw GridScoreError(i, e.what());
        }
    }
    return out;
}

double CachedScorer::score(const ScoreRequest& request) {
    const auto key = ScoreCacheKey::make(backend_.fingerprint(), request);
    if (auto hit = cache_.find(key)) {
        ++cache_hits_;
        return *hit;
    }
    ++backend_calls_;
    const double s = backend_.score(request);
    if (!std::isfinite(s)) throw NonFiniteScore("non-finite score from " + backend_.fingerprint());
    cache_.insert(key, s);
    return s;
}

}  // namespace anchoring
