#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "namegender/cache.hpp"
#include "namegender/core.hpp"

namespace namegender {

// Parsed name-API response. gender is empty for a null upstream gender, in
// which case probability/count are ignored. probability is toward the
// reported gender and must lie in [0.5, 1] when a gender is present.
struct GenderizeResponse {
    std::string name;
    std::optional<std::string> gender;  // "male" | "female"
    double probability = 0.0;
    long count = 0;
};

// One detected face in one retrieved thumbnail.
struct FaceObservation {
    int image_rank = 1;  // 1-5
    double x = 0, y = 0, width = 0, height = 0;  // pixels
    std::string gender;      // "male" | "female"
    double confidence = 0;   // [0, 100]

    double area() const { return width * height; }
    bool operator==(const FaceObservation&) const = default;
};

// Validating constructor; throws ContractViolation on out-of-range fields.
FaceObservation make_face_observation(int image_rank, double x, double y, double width,
                                      double height, std::string gender, double confidence);

// Map a body to the domain types. Throw DecodeError on contract violations.
GenderizeResponse parse_genderize_response(const std::string& body);
Prediction prediction_from_genderize(const GenderizeResponse& response);
std::vector<FaceObservation> parse_face_response(const std::string& body, int image_rank);
std::vector<std::string> parse_search_response(const std::string& body);  // thumbnail URLs

struct HttpResponse {
    int status = 0;
    std::string body;
};

// Raw HTTP, behind an interface so tests can fake it and replay mode can
// forbid it outright.
class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse get(const std::string& url) = 0;
    virtual HttpResponse post_multipart(const std::string& url, const std::string& field_name,
                                        const std::string& filename,
                                        const std::string& content_type,
                                        const std::string& bytes) = 0;
};

// cpp-httplib backed transport. Throws TransportError when the host cannot
// be reached.
std::shared_ptr<Transport> make_httplib_transport();

// Every call throws TransportError. Installed in replay mode so a fixture
// gap can never silently reach the network.
std::shared_ptr<Transport> make_forbidden_transport();

enum class RunMode { Live, Cached, Replay };

std::string_view to_string(RunMode mode);
std::optional<RunMode> run_mode_from_string(std::string_view name);

struct ClientConfig {
    RunMode mode = RunMode::Replay;
    std::string genderize_endpoint;  // e.g. "https://api.genderize.io"
    std::string images_endpoint;
    std::string face_endpoint;
    std::string genderize_key;       // appended as `apikey` when non-empty
    std::string images_key;          // appended as `key`
    std::string face_key;            // appended as `api_key`
    std::string fixtures_dir;        // thumbnail fixtures: <dir>/<query-hash>/1.jpg ...
    int thumbnails_k = 5;            // [0, 5]
    double rate_limit_rps = 1.0;     // per backend
    int max_retries = 5;             // on HTTP 429
    int retry_base_ms = 500;
};

// Serializes callers to at most `rps` acquisitions per second.
class RateLimiter {
public:
    explicit RateLimiter(double rps) : interval_(std::chrono::duration<double>(1.0 / rps)) {}
    void acquire();

private:
    std::mutex mutex_;
    std::chrono::duration<double> interval_;
    std::chrono::steady_clock::time_point next_{};
};

// The three HTTP backends plus caching and replay. Shareable across threads;
// each backend is rate limited independently and 429s are retried with
// exponential backoff and jitter.
//
// Canonical cache queries (these strings are the on-disk contract):
//   Genderize  "<first>"  or  "<first>|<CC>"
//   Face       "<query>#<rank>"      thumbnail bytes for one rank
//              "<query>#search"      the search listing (JSON array of URLs)
//              "detect:<fnv1a64 of image bytes>"   face-detect response
class WebClients {
public:
    WebClients(ClientConfig config, std::shared_ptr<ResponseCache> cache,
               std::shared_ptr<Transport> transport = nullptr);

    // Null upstream gender -> abstain; otherwise score = ±(2·probability−1)
    // signed by the reported gender.
    Prediction genderize_lookup(const std::string& first_name,
                                const std::optional<std::string>& country);

    // Up to k thumbnail payloads in rank order. Zero results is an empty
    // list; in replay mode an unknown query (no cache entry and no fixture
    // directory) throws MissingFixtureError.
    std::vector<std::string> fetch_thumbnails(const std::string& query, int k);

    std::vector<FaceObservation> detect_faces(const std::string& image, int image_rank);

    // Full image pipeline: thumbnails for the query, faces per image,
    // aggregated into one prediction.
    Prediction face_prediction(const std::string& query);

    const ClientConfig& config() const { return config_; }

private:
    HttpResponse fetch_with_retry(BackendId backend, const std::string& url,
                                  const std::function<HttpResponse()>& request);
    std::optional<CachedResponse> cached(BackendId backend, const std::string& query) const;
    void store(BackendId backend, const std::string& query, const HttpResponse& response);

    ClientConfig config_;
    std::shared_ptr<ResponseCache> cache_;
    std::shared_ptr<Transport> transport_;
    RateLimiter genderize_limiter_;
    RateLimiter images_limiter_;
    RateLimiter face_limiter_;
};

}  // namespace namegender
