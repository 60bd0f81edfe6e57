#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "namegender/core.hpp"

namespace namegender {

// One persisted upstream response. payload holds the verbatim body bytes.
struct CachedResponse {
    BackendId backend = BackendId::Genderize;
    std::string query;       // canonical query string; (backend, query) is the key
    std::string fetched_at;  // UTC, ISO 8601
    std::string payload;     // raw bytes
    int status = 0;

    bool operator==(const CachedResponse&) const = default;
};

// Append-only JSON-lines response cache, one record per line:
//   {"backend":"Genderize","query":"peter|US","fetched_at":"...","status":200,"payload_b64":"..."}
// The whole file is indexed in memory at construction; get() returns the most
// recent record for a key. Corrupt lines are skipped with a warning on
// stderr, never fatally. Appends are serialized through one writer lock;
// reads take a shared lock on the in-memory index.
class ResponseCache {
public:
    // Loads `file` if it exists; an absent file is an empty cache (the file
    // is created on the first put).
    explicit ResponseCache(std::filesystem::path file);

    std::optional<CachedResponse> get(BackendId backend, const std::string& query) const;
    void put(const CachedResponse& response);

    struct Stats {
        long records = 0;                      // raw lines, including superseded
        long skipped = 0;                      // corrupt lines ignored at load
        std::map<BackendId, long> entries;     // current (most recent) per backend
        long total_entries() const;
    };
    Stats stats() const;

    // Rewrites the file keeping only the most recent record per key, in the
    // order of each survivor's last appearance. Returns how many records
    // were dropped.
    long prune();

    const std::filesystem::path& file() const { return file_; }

    static std::string serialize(const CachedResponse& response);   // one JSONL line, no '\n'
    static std::optional<CachedResponse> deserialize(const std::string& line);

private:
    void load();

    std::filesystem::path file_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, CachedResponse> index_;
    long records_ = 0;
    long skipped_ = 0;
};

}  // namespace namegender
