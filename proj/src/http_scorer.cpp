#include "anchoring/scorer.hpp"

#include "anchoring/rng.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cstdlib>
#include <regex>

namespace anchoring {

using nlohmann::json;

HttpScorerOptions http_options_from_env(const std::string& url_var, const std::string& token_var) {
    HttpScorerOptions options;
    if (const char* url = std::getenv(url_var.c_str())) options.url = url;
    if (const char* token = std::getenv(token_var.c_str())) options.token = token;
    if (options.url.empty()) throw ConfigError("scorer endpoint not set: export " + url_var);
    return options;
}

HttpScorer::HttpScorer(HttpScorerOptions options) : options_(std::move(options)) {
    static const std::regex kUrl(R"(^(https?)://([^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(options_.url, m, kUrl)) throw ConfigError("malformed scorer URL '" + options_.url + "'");
    if (m[1] == "https") throw ConfigError("https scorer endpoints are not supported by this build");
    scheme_host_ = m[1].str() + "://" + m[2].str();
    path_ = m[3].matched ? m[3].str() : "/";
}

std::string HttpScorer::fingerprint() const {
    return "http/v" + std::to_string(kScorerProtocolVersion) + ":" + options_.model_label + "@" + options_.url;
}

double parse_score_response(std::string_view body, std::string_view continuation) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        throw TransportError(std::string("scorer response is not JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("token_logprobs") || !doc.contains("tokens")) {
        throw TransportError("scorer response lacks token_logprobs or tokens");
    }
    const auto& lps = doc["token_logprobs"];
    const auto& toks = doc["tokens"];
    if (!lps.is_array() || !toks.is_array() || lps.empty()) {
        throw TransportError("token_logprobs and tokens must be non-empty arrays");
    }
    if (lps.size() != toks.size()) {
        throw TokenizationMismatch("got " + std::to_string(lps.size()) + " log-probs for " +
                                   std::to_string(toks.size()) + " tokens");
    }

    std::string spelled;
    std::vector<double> values;
    values.reserve(lps.size());
    for (std::size_t k = 0; k < lps.size(); ++k) {
        if (!toks[k].is_string()) throw TransportError("tokens must be strings");
        spelled += toks[k].get<std::string>();
        if (lps[k].is_null()) throw NonFiniteScore("token " + std::to_string(k) + " has a null log-prob");
        if (!lps[k].is_number()) throw TransportError("token_logprobs must be numbers");
        values.push_back(lps[k].get<double>());
    }
    if (spelled != continuation) {
        throw TokenizationMismatch("tokens spell '" + spelled + "' but the continuation is '" +
                                   std::string(continuation) + "'");
    }
    return sum_token_logprobs(values);
}

double HttpScorer::score(const ScoreRequest& request) {
    // One client per call: httplib clients are not shareable across threads.
    httplib::Client client(scheme_host_);
    const auto secs = static_cast<time_t>(options_.timeout_s);
    const auto usecs = static_cast<time_t>((options_.timeout_s - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    if (!options_.token.empty()) client.set_bearer_token_auth(options_.token);

    const json body = {{"version", kScorerProtocolVersion},
                       {"prompt", request.prompt},
                       {"continuation", request.continuation()}};
    auto res = client.Post(path_, body.dump(), "application/json");
    if (!res) throw TransportError("scorer request failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300) {
        throw TransportError("scorer returned HTTP " + std::to_string(res->status));
    }
    return parse_score_response(res->body, request.continuation());
}

}  // namespace anchoring
