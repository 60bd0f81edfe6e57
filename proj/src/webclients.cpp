#include "namegender/webclients.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <functional>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "namegender/errors.hpp"
#include "namegender/fusion.hpp"
#include "namegender/util.hpp"

namespace fs = std::filesystem;

namespace namegender {

FaceObservation make_face_observation(int image_rank, double x, double y, double width,
                                      double height, std::string gender, double confidence) {
    if (image_rank < 1 || image_rank > 5)
        throw ContractViolation("image_rank out of [1,5]: " + std::to_string(image_rank));
    if (!(width > 0) || !(height > 0))
        throw ContractViolation("face bounding box must have positive width and height");
    if (gender != "male" && gender != "female")
        throw ContractViolation("face gender must be `male` or `female`, got `" + gender + "`");
    if (!(confidence >= 0.0 && confidence <= 100.0))
        throw ContractViolation("face confidence out of [0,100]");
    return FaceObservation{image_rank, x, y, width, height, std::move(gender), confidence};
}

GenderizeResponse parse_genderize_response(const std::string& body) {
    nlohmann::json j = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (!j.is_object()) throw DecodeError("genderize response is not a JSON object");

    GenderizeResponse out;
    out.name = j.value("name", std::string());
    if (!j.contains("gender") || j["gender"].is_null()) return out;
    if (!j["gender"].is_string()) throw DecodeError("genderize `gender` must be a string or null");
    std::string gender = j["gender"].get<std::string>();
    if (gender != "male" && gender != "female")
        throw DecodeError("genderize `gender` must be `male` or `female`, got `" + gender + "`");
    if (!j.contains("probability") || !j["probability"].is_number())
        throw DecodeError("genderize response with a gender needs a numeric `probability`");
    out.gender = gender;
    out.probability = j["probability"].get<double>();
    if (!(out.probability >= 0.5 && out.probability <= 1.0))
        throw DecodeError("genderize `probability` must lie in [0.5,1], got " +
                          util::double_to_string(out.probability));
    if (j.contains("count") && j["count"].is_number_integer()) out.count = j["count"].get<long>();
    return out;
}

Prediction prediction_from_genderize(const GenderizeResponse& response) {
    if (!response.gender) return abstain(BackendId::Genderize);
    double magnitude = 2.0 * response.probability - 1.0;
    double score = (*response.gender == "male") ? magnitude : -magnitude;
    return make_prediction(score, BackendId::Genderize);
}

std::vector<FaceObservation> parse_face_response(const std::string& body, int image_rank) {
    nlohmann::json j = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (!j.is_object() || !j.contains("faces") || !j["faces"].is_array())
        throw DecodeError("face response must be an object with a `faces` array");

    std::vector<FaceObservation> out;
    for (const auto& face : j["faces"]) {
        if (!face.contains("face_rectangle") || !face.contains("attributes"))
            throw DecodeError("face entry needs `face_rectangle` and `attributes`");
        const auto& rect = face["face_rectangle"];
        const auto& attrs = face["attributes"];
        if (!attrs.contains("gender") || !attrs["gender"].is_object())
            throw DecodeError("face attributes need a `gender` object");
        const auto& gender = attrs["gender"];
        if (!gender.contains("value") || !gender["value"].is_string())
            throw DecodeError("face gender needs a string `value`");
        std::string value = gender["value"].get<std::string>();
        for (char& c : value) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (!gender.contains("confidence") || !gender["confidence"].is_number())
            throw DecodeError("face gender needs a numeric `confidence`");
        for (const char* field : {"left", "top", "width", "height"})
            if (!rect.contains(field) || !rect[field].is_number())
                throw DecodeError(std::string("face_rectangle needs numeric `") + field + "`");
        try {
            out.push_back(make_face_observation(
                image_rank, rect["left"].get<double>(), rect["top"].get<double>(),
                rect["width"].get<double>(), rect["height"].get<double>(), std::move(value),
                gender["confidence"].get<double>()));
        } catch (const ContractViolation& e) {
            throw DecodeError(std::string("face response out of contract: ") + e.what());
        }
    }
    return out;
}

std::vector<std::string> parse_search_response(const std::string& body) {
    nlohmann::json j = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (!j.is_object() || !j.contains("thumbnails") || !j["thumbnails"].is_array())
        throw DecodeError("search response must be an object with a `thumbnails` array");
    std::vector<std::string> urls;
    for (const auto& url : j["thumbnails"]) {
        if (!url.is_string()) throw DecodeError("search `thumbnails` must hold strings");
        urls.push_back(url.get<std::string>());
    }
    return urls;
}

std::string_view to_string(RunMode mode) {
    switch (mode) {
        case RunMode::Live: return "live";
        case RunMode::Cached: return "cached";
        case RunMode::Replay: return "replay";
    }
    return "?";
}

std::optional<RunMode> run_mode_from_string(std::string_view name) {
    if (name == "live") return RunMode::Live;
    if (name == "cached") return RunMode::Cached;
    if (name == "replay") return RunMode::Replay;
    return std::nullopt;
}

namespace {

// Splits an absolute URL into the httplib client base and request target.
std::pair<std::string, std::string> split_url(const std::string& url) {
    size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw TransportError("URL must be absolute (scheme://...): " + url);
    size_t authority = scheme_end + 3;
    size_t cut = url.find_first_of("/?", authority);
    if (cut == std::string::npos) return {url, "/"};
    std::string base = url.substr(0, cut);
    std::string target = url.substr(cut);
    if (target[0] == '?') target = "/" + target;
    return {base, target};
}

class HttplibTransport : public Transport {
public:
    HttpResponse get(const std::string& url) override {
        auto [base, target] = split_url(url);
        httplib::Client client(base);
        configure(client);
        return finish(client.Get(target), url);
    }

    HttpResponse post_multipart(const std::string& url, const std::string& field_name,
                                const std::string& filename, const std::string& content_type,
                                const std::string& bytes) override {
        auto [base, target] = split_url(url);
        httplib::Client client(base);
        configure(client);
        httplib::MultipartFormDataItems items = {{field_name, bytes, filename, content_type}};
        return finish(client.Post(target, items), url);
    }

private:
    static void configure(httplib::Client& client) {
        client.set_connection_timeout(10, 0);
        client.set_read_timeout(30, 0);
        client.set_follow_location(true);
    }

    static HttpResponse finish(httplib::Result result, const std::string& url) {
        if (!result)
            throw TransportError("request to " + url + " failed: " +
                                 httplib::to_string(result.error()));
        return HttpResponse{result->status, result->body};
    }
};

class ForbiddenTransport : public Transport {
public:
    HttpResponse get(const std::string& url) override { return refuse(url); }
    HttpResponse post_multipart(const std::string& url, const std::string&, const std::string&,
                                const std::string&, const std::string&) override {
        return refuse(url);
    }

private:
    [[noreturn]] static HttpResponse refuse(const std::string& url) {
        throw TransportError("network access is forbidden in replay mode (request to " + url + ")");
    }
};

std::string join_query(const std::string& endpoint, const std::string& query) {
    std::string base = endpoint;
    while (!base.empty() && base.back() == '/') base.pop_back();
    return base + "?" + query;
}

int jittered_delay_ms(int base_ms, int attempt) {
    double delay = static_cast<double>(base_ms) * static_cast<double>(1 << attempt);
    thread_local std::mt19937 rng{std::random_device{}()};
    std::uniform_real_distribution<double> jitter(0.0, 0.25 * delay);
    return static_cast<int>(delay + jitter(rng));
}

bool is_success(int status) { return status >= 200 && status < 300; }

}  // namespace

std::shared_ptr<Transport> make_httplib_transport() { return std::make_shared<HttplibTransport>(); }

std::shared_ptr<Transport> make_forbidden_transport() {
    return std::make_shared<ForbiddenTransport>();
}

void RateLimiter::acquire() {
    std::lock_guard lock(mutex_);
    auto now = std::chrono::steady_clock::now();
    if (next_ > now) {
        std::this_thread::sleep_until(next_);
        now = next_;
    }
    next_ = now + std::chrono::duration_cast<std::chrono::steady_clock::duration>(interval_);
}

WebClients::WebClients(ClientConfig config, std::shared_ptr<ResponseCache> cache,
                       std::shared_ptr<Transport> transport)
    : config_(std::move(config)),
      cache_(std::move(cache)),
      transport_(std::move(transport)),
      genderize_limiter_(config_.rate_limit_rps),
      images_limiter_(config_.rate_limit_rps),
      face_limiter_(config_.rate_limit_rps) {
    if (config_.thumbnails_k < 0 || config_.thumbnails_k > 5)
        throw ConfigError("thumbnails_k must lie in [0,5]");
    if (!(config_.rate_limit_rps > 0)) throw ConfigError("rate limit must be positive");
    if (config_.mode == RunMode::Replay && cache_ == nullptr && config_.fixtures_dir.empty())
        throw ConfigError("replay mode requires a cache file or a fixtures directory");
    if (transport_ == nullptr)
        transport_ = config_.mode == RunMode::Replay ? make_forbidden_transport()
                                                     : make_httplib_transport();
}

std::optional<CachedResponse> WebClients::cached(BackendId backend,
                                                 const std::string& query) const {
    if (cache_ == nullptr) return std::nullopt;
    return cache_->get(backend, query);
}

void WebClients::store(BackendId backend, const std::string& query,
                       const HttpResponse& response) {
    if (cache_ == nullptr) return;
    cache_->put(CachedResponse{backend, query, util::iso8601_utc_now(), response.body,
                               response.status});
}

HttpResponse WebClients::fetch_with_retry(BackendId backend, const std::string& url,
                                          const std::function<HttpResponse()>& request) {
    RateLimiter& limiter = backend == BackendId::Genderize ? genderize_limiter_
                           : backend == BackendId::Face    ? face_limiter_
                                                           : images_limiter_;
    HttpResponse response;
    for (int attempt = 0;; ++attempt) {
        limiter.acquire();
        response = request();
        if (response.status != 429 || attempt >= config_.max_retries) return response;
        std::this_thread::sleep_for(
            std::chrono::milliseconds(jittered_delay_ms(config_.retry_base_ms, attempt)));
    }
    (void)url;
}

Prediction WebClients::genderize_lookup(const std::string& first_name,
                                        const std::optional<std::string>& country) {
    if (first_name.empty()) throw ContractViolation("genderize_lookup needs a non-empty name");
    std::string query = country ? first_name + "|" + *country : first_name;

    HttpResponse response;
    std::optional<CachedResponse> hit;
    if (config_.mode != RunMode::Live) hit = cached(BackendId::Genderize, query);
    if (hit) {
        response = HttpResponse{hit->status, hit->payload};
    } else {
        if (config_.mode == RunMode::Replay)
            throw MissingFixtureError(std::string(to_string(BackendId::Genderize)), query);
        if (config_.genderize_endpoint.empty())
            throw ConfigError("no genderize endpoint configured");
        std::string url_query = "name=" + util::percent_encode(first_name);
        if (country) url_query += "&country_id=" + util::percent_encode(*country);
        if (!config_.genderize_key.empty())
            url_query += "&apikey=" + util::percent_encode(config_.genderize_key);
        std::string url = join_query(config_.genderize_endpoint, url_query);
        response = fetch_with_retry(BackendId::Genderize, url,
                                    [&] { return transport_->get(url); });
        store(BackendId::Genderize, query, response);
    }

    if (!is_success(response.status))
        throw UpstreamError(response.status, "genderize lookup for `" + first_name + "`");
    return prediction_from_genderize(parse_genderize_response(response.body));
}

std::vector<std::string> WebClients::fetch_thumbnails(const std::string& query, int k) {
    if (query.empty()) throw ContractViolation("fetch_thumbnails needs a non-empty query");
    if (k < 0 || k > 5) throw ContractViolation("thumbnail count out of [0,5]");
    if (k == 0) return {};

    const std::string search_key = query + "#search";
    auto rank_key = [&query](int rank) { return query + "#" + std::to_string(rank); };

    if (config_.mode != RunMode::Live) {
        if (auto listing = cached(BackendId::Face, search_key)) {
            if (!is_success(listing->status))
                throw UpstreamError(listing->status, "image search for `" + query + "`");
            auto urls = parse_search_response(listing->payload);
            int n = std::min<int>(k, static_cast<int>(urls.size()));
            std::vector<std::string> images;
            for (int rank = 1; rank <= n; ++rank) {
                auto image = cached(BackendId::Face, rank_key(rank));
                if (!image)
                    throw MissingFixtureError(std::string(to_string(BackendId::Face)),
                                              rank_key(rank));
                if (!is_success(image->status))
                    throw UpstreamError(image->status, "thumbnail " + rank_key(rank));
                images.push_back(image->payload);
            }
            return images;
        }
        if (config_.mode == RunMode::Replay) {
            // Fixture layout: <fixtures_dir>/<fnv1a64 hex of query>/<rank>.jpg
            if (!config_.fixtures_dir.empty()) {
                fs::path dir = fs::path(config_.fixtures_dir) / util::fnv1a64_hex(query);
                if (fs::is_directory(dir)) {
                    std::vector<std::string> images;
                    for (int rank = 1; rank <= k; ++rank) {
                        fs::path file = dir / (std::to_string(rank) + ".jpg");
                        if (!fs::is_regular_file(file)) break;
                        images.push_back(util::read_file(file.string()));
                    }
                    return images;  // empty directory means zero results
                }
            }
            throw MissingFixtureError(std::string(to_string(BackendId::Face)), search_key);
        }
    }

    if (config_.images_endpoint.empty()) throw ConfigError("no image search endpoint configured");
    std::string url_query = "q=" + util::percent_encode(query) + "&count=" + std::to_string(k);
    if (!config_.images_key.empty())
        url_query += "&key=" + util::percent_encode(config_.images_key);
    std::string url = join_query(config_.images_endpoint, url_query);
    HttpResponse listing = fetch_with_retry(BackendId::Face, url,
                                            [&] { return transport_->get(url); });
    store(BackendId::Face, search_key, listing);
    if (!is_success(listing.status))
        throw UpstreamError(listing.status, "image search for `" + query + "`");

    auto urls = parse_search_response(listing.payload);
    int n = std::min<int>(k, static_cast<int>(urls.size()));
    std::vector<std::string> images;
    for (int rank = 1; rank <= n; ++rank) {
        const std::string& image_url = urls[static_cast<size_t>(rank - 1)];
        HttpResponse image = fetch_with_retry(BackendId::Face, image_url,
                                              [&] { return transport_->get(image_url); });
        store(BackendId::Face, rank_key(rank), image);
        if (!is_success(image.status)) throw UpstreamError(image.status, "thumbnail " + image_url);
        images.push_back(std::move(image.body));
    }
    return images;
}

std::vector<FaceObservation> WebClients::detect_faces(const std::string& image, int image_rank) {
    if (image.empty()) throw ContractViolation("detect_faces needs a non-empty image payload");
    const std::string query = "detect:" + util::fnv1a64_hex(image);

    HttpResponse response;
    std::optional<CachedResponse> hit;
    if (config_.mode != RunMode::Live) hit = cached(BackendId::Face, query);
    if (hit) {
        response = HttpResponse{hit->status, hit->payload};
    } else {
        if (config_.mode == RunMode::Replay)
            throw MissingFixtureError(std::string(to_string(BackendId::Face)), query);
        if (config_.face_endpoint.empty()) throw ConfigError("no face endpoint configured");
        std::string url = config_.face_endpoint;
        if (!config_.face_key.empty())
            url = join_query(url, "api_key=" + util::percent_encode(config_.face_key));
        response = fetch_with_retry(BackendId::Face, url, [&] {
            return transport_->post_multipart(url, "image_file", "image.jpg",
                                              "application/octet-stream", image);
        });
        store(BackendId::Face, query, response);
    }

    if (!is_success(response.status))
        throw UpstreamError(response.status, "face detection rejected image (rank " +
                                                 std::to_string(image_rank) + ")");
    return parse_face_response(response.body, image_rank);
}

Prediction WebClients::face_prediction(const std::string& query) {
    std::vector<std::string> images = fetch_thumbnails(query, config_.thumbnails_k);
    std::vector<FaceObservation> observations;
    for (size_t i = 0; i < images.size(); ++i) {
        auto faces = detect_faces(images[i], static_cast<int>(i) + 1);
        observations.insert(observations.end(), faces.begin(), faces.end());
    }
    return aggregate_faces(observations, static_cast<int>(images.size()));
}

}  // namespace namegender
