#include "namegender/cache.hpp"

#include <fstream>
#include <iostream>
#include <vector>

#include <json.hpp>

#include "namegender/errors.hpp"
#include "namegender/util.hpp"

namespace namegender {

namespace {

// \x1f cannot appear in backend names, making the composite key unambiguous.
std::string cache_key(BackendId backend, const std::string& query) {
    return std::string(to_string(backend)) + '\x1f' + query;
}

}  // namespace

long ResponseCache::Stats::total_entries() const {
    long sum = 0;
    for (const auto& [backend, count] : entries) sum += count;
    return sum;
}

std::string ResponseCache::serialize(const CachedResponse& response) {
    nlohmann::json j{
        {"backend", std::string(to_string(response.backend))},
        {"query", response.query},
        {"fetched_at", response.fetched_at},
        {"status", response.status},
        {"payload_b64", util::base64_encode(response.payload)},
    };
    return j.dump();
}

std::optional<CachedResponse> ResponseCache::deserialize(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (!j.is_object()) return std::nullopt;
    if (!j.contains("backend") || !j["backend"].is_string()) return std::nullopt;
    if (!j.contains("query") || !j["query"].is_string()) return std::nullopt;
    if (!j.contains("status") || !j["status"].is_number_integer()) return std::nullopt;
    if (!j.contains("payload_b64") || !j["payload_b64"].is_string()) return std::nullopt;

    auto backend = backend_from_string(j["backend"].get<std::string>());
    if (!backend) return std::nullopt;
    auto payload = util::base64_decode(j["payload_b64"].get<std::string>());
    if (!payload) return std::nullopt;

    CachedResponse response;
    response.backend = *backend;
    response.query = j["query"].get<std::string>();
    response.fetched_at = j.value("fetched_at", std::string());
    response.status = j["status"].get<int>();
    response.payload = std::move(*payload);
    return response;
}

ResponseCache::ResponseCache(std::filesystem::path file) : file_(std::move(file)) { load(); }

void ResponseCache::load() {
    std::ifstream in(file_, std::ios::binary);
    if (!in) return;  // absent file: empty cache
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto response = deserialize(line);
        if (!response) {
            ++skipped_;
            std::cerr << "namegender: warning: skipping corrupt cache line " << line_no << " in "
                      << file_.string() << "\n";
            continue;
        }
        ++records_;
        index_[cache_key(response->backend, response->query)] = std::move(*response);
    }
}

std::optional<CachedResponse> ResponseCache::get(BackendId backend, const std::string& query) const {
    std::shared_lock lock(mutex_);
    auto it = index_.find(cache_key(backend, query));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void ResponseCache::put(const CachedResponse& response) {
    std::unique_lock lock(mutex_);
    std::ofstream out(file_, std::ios::binary | std::ios::app);
    if (!out) throw Error("cannot append to cache file: " + file_.string());
    out << serialize(response) << '\n';
    if (!out) throw Error("cache write failed: " + file_.string());
    ++records_;
    index_[cache_key(response.backend, response.query)] = response;
}

ResponseCache::Stats ResponseCache::stats() const {
    std::shared_lock lock(mutex_);
    Stats stats;
    stats.records = records_;
    stats.skipped = skipped_;
    for (BackendId id : kAllBackends) stats.entries[id] = 0;
    for (const auto& [key, response] : index_) ++stats.entries[response.backend];
    return stats;
}

long ResponseCache::prune() {
    std::unique_lock lock(mutex_);
    std::ifstream in(file_, std::ios::binary);
    if (!in) return 0;

    // Keep the last record per key, in order of last appearance.
    std::vector<std::pair<std::string, std::string>> lines;  // key, raw line
    std::unordered_map<std::string, size_t> last;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto response = deserialize(line);
        if (!response) continue;  // prune also drops corrupt lines
        std::string key = cache_key(response->backend, response->query);
        last[key] = lines.size();
        lines.emplace_back(std::move(key), line);
    }
    in.close();

    std::ofstream out(file_, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot rewrite cache file: " + file_.string());
    long kept = 0;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (last[lines[i].first] != i) continue;
        out << lines[i].second << '\n';
        ++kept;
    }
    long dropped = static_cast<long>(lines.size()) - kept + skipped_;
    records_ = kept;
    skipped_ = 0;
    return dropped;
}

}  // namespace namegender
