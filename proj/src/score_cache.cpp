#include "anchoring/scorer.hpp"

#include <cerrno>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>

#include <unistd.h>

namespace anchoring {

namespace {

constexpr const char* kCacheHeader = "# anchoring score cache v1";

struct ParsedRecord {
    std::string key;
    std::string fingerprint;
    double score = 0.0;
};

std::optional<ParsedRecord> parse_record(const std::string& line) {
    const auto last_tab = line.rfind('\t');
    const auto first_tab = line.find('\t');
    if (last_tab == std::string::npos || first_tab == last_tab) return std::nullopt;
    // Exactly four columns.
    const auto second_tab = line.find('\t', first_tab + 1);
    if (second_tab == std::string::npos || line.find('\t', second_tab + 1) != last_tab) return std::nullopt;

    const char* begin = line.data() + last_tab + 1;
    const char* end = line.data() + line.size();
    double score = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, score);
    if (ec != std::errc{} || ptr != end || !std::isfinite(score)) return std::nullopt;
    return ParsedRecord{line.substr(0, last_tab), line.substr(0, first_tab), score};
}

std::string format_score(double s) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, s);
    return std::string(buf, ptr);
}

}  // namespace

ScoreCache::ScoreCache(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(*path_);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        if (auto rec = parse_record(line)) entries_[rec->key] = rec->score;
    }
}

ScoreCache::~ScoreCache() {
    try {
        flush();
    } catch (...) {
    }
}

std::optional<double> ScoreCache::find(const ScoreCacheKey& key) const {
    std::lock_guard lock(mutex_);
    const auto it = entries_.find(key.serialize());
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void ScoreCache::insert(const ScoreCacheKey& key, double score) {
    auto serialized = key.serialize();
    std::lock_guard lock(mutex_);
    entries_[serialized] = score;
    if (path_) pending_.push_back(std::move(serialized) + '\t' + format_score(score));
}

void ScoreCache::flush() {
    std::lock_guard lock(mutex_);
    if (!path_ || pending_.empty()) return;

    const bool fresh = !std::filesystem::exists(*path_) || std::filesystem::file_size(*path_) == 0;
    std::FILE* f = std::fopen(path_->c_str(), "a");
    if (!f) throw std::runtime_error("cannot open score cache " + path_->string() + ": " + std::strerror(errno));
    if (fresh) std::fprintf(f, "%s\n", kCacheHeader);
    for (const auto& rec : pending_) {
        std::fputs(rec.c_str(), f);
        std::fputc('\n', f);
    }
    const bool ok = std::fflush(f) == 0 && ::fsync(::fileno(f)) == 0;
    std::fclose(f);
    if (!ok) throw std::runtime_error("failed to sync score cache " + path_->string());
    pending_.clear();
}

std::size_t ScoreCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

CacheSummary ScoreCache::inspect(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read score cache " + path.string());
    CacheSummary summary;
    std::set<std::string> keys;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        auto rec = parse_record(line);
        if (!rec) {
            ++summary.malformed_lines;
            continue;
        }
        ++summary.records;
        if (keys.insert(rec->key).second) ++summary.per_fingerprint[rec->fingerprint];
    }
    summary.unique_keys = keys.size();
    return summary;
}

}  // namespace anchoring
