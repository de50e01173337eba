#include "anchoring/scorer.hpp"

#include "anchoring/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace anchoring {

namespace {

LogProbVector log_normalized(const LogProbVector& logits) {
    const double hi = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (double l : logits) total += std::exp(l - hi);
    const double lse = hi + std::log(total);
    LogProbVector out{};
    for (int i = 0; i < kTargetCount; ++i) out[i] = logits[i] - lse;
    return out;
}

LogProbVector bell_logprobs(double center, double width) {
    LogProbVector logits{};
    for (int i = 0; i < kTargetCount; ++i) {
        const double z = (i - center) / width;
        logits[i] = -0.5 * z * z;
    }
    return log_normalized(logits);
}

}  // namespace

SyntheticOracle::SyntheticOracle(OracleSpec spec) : spec_(std::move(spec)) {
    auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(spec_.base_mode) || !finite(spec_.sensitivity) || !finite(spec_.reference) ||
        !std::all_of(spec_.field_offsets.begin(), spec_.field_offsets.end(), finite)) {
        throw ConfigError("oracle parameters must be finite");
    }
    if (!(spec_.noise_sd >= 0.0) || !finite(spec_.noise_sd)) throw ConfigError("oracle noise_sd must be >= 0");

    if (spec_.base_probs) {
        const auto& p = *spec_.base_probs;
        if (p.size() != kTargetCount) throw ConfigError("oracle base_probs must have 101 entries");
        double total = 0.0;
        for (double x : p) {
            if (!(x > 0.0) || !finite(x)) throw ConfigError("oracle base_probs entries must be positive and finite");
            total += x;
        }
        if (!(total > 0.0) || !finite(total)) throw ConfigError("oracle base_probs cannot be normalized");
        if (spec_.sensitivity != 0.0) throw ConfigError("anchor sensitivity requires the bell-curve base");
        for (int i = 0; i < kTargetCount; ++i) base_logprobs_[i] = std::log(p[i] / total);
    } else {
        if (!(spec_.width > 0.0) || !finite(spec_.width)) throw ConfigError("oracle width must be positive");
        base_logprobs_ = bell_logprobs(spec_.base_mode, spec_.width);
    }
}

LogProbVector SyntheticOracle::categorical_logprobs(std::optional<int> anchor) const {
    if (!anchor || spec_.base_probs || spec_.sensitivity == 0.0) return base_logprobs_;
    const double center = spec_.base_mode + spec_.sensitivity * (*anchor - spec_.reference);
    return bell_logprobs(center, spec_.width);
}

double SyntheticOracle::value(FieldSubset subset, int anchor, int target) const {
    if (spec_.prompt_insensitive) return base_logprobs_.at(target);

    const bool anchored = subset.contains(Field::Anchor);
    // Recomputing the categorical per call keeps the oracle stateless; 101 exps is cheap.
    double lp = anchored ? categorical_logprobs(anchor)[target] : base_logprobs_.at(target);
    for (Field f : kAllFields) {
        if (subset.contains(f)) lp += spec_.field_offsets[static_cast<int>(f)];
    }
    if (spec_.noise_sd > 0.0) {
        const std::uint64_t cell = subset.mask() | (anchored ? static_cast<std::uint64_t>(anchor + 1) << 4 : 0);
        SplitMix64 gen(derive_seed(spec_.noise_seed, cell, static_cast<std::uint64_t>(target)));
        lp += spec_.noise_sd * gen.normal();
    }
    return lp;
}

double SyntheticOracle::score(const ScoreRequest& request) {
    const int target = parse_target(request.target);
    if (spec_.prompt_insensitive) return base_logprobs_[target];
    if (!request.context) throw ScorerError("synthetic oracle needs the prompt context of each request");
    return value(request.context->subset, request.context->anchor, target);
}

std::string SyntheticOracle::fingerprint() const {
    std::string desc;
    char buf[64];
    auto add = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g,", x);
        desc += buf;
    };
    if (spec_.base_probs) {
        for (double x : *spec_.base_probs) add(x);
    } else {
        add(spec_.base_mode);
        add(spec_.width);
    }
    add(spec_.sensitivity);
    add(spec_.reference);
    for (double c : spec_.field_offsets) add(c);
    add(spec_.noise_sd);
    desc += std::to_string(spec_.noise_seed);
    desc += spec_.prompt_insensitive ? ",insensitive" : "";
    std::snprintf(buf, sizeof buf, "oracle/v1:%016llx", static_cast<unsigned long long>(fnv1a64(desc)));
    return buf;
}

std::unique_ptr<Scorer> make_synthetic_oracle(const OracleSpec& spec) {
    return std::make_unique<SyntheticOracle>(spec);
}

}  // namespace anchoring
