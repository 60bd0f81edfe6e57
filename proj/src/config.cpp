#include "namegender/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "namegender/errors.hpp"
#include "namegender/util.hpp"

namespace fs = std::filesystem;

namespace namegender {

ClientConfig RunConfig::client_config() const {
    ClientConfig client;
    client.mode = mode;
    client.genderize_endpoint = genderize_endpoint;
    client.images_endpoint = images_endpoint;
    client.face_endpoint = face_endpoint;
    client.genderize_key = genderize_key;
    client.images_key = images_key;
    client.face_key = face_key;
    client.fixtures_dir = fixtures_dir;
    client.thumbnails_k = thumbnails_k;
    client.rate_limit_rps = rate_limit_rps;
    client.max_retries = max_retries;
    client.retry_base_ms = retry_base_ms;
    return client;
}

namespace {

std::string get_string(const nlohmann::json& j, const std::string& key) {
    if (!j[key].is_string()) throw ConfigError("config key `" + key + "` must be a string");
    return j[key].get<std::string>();
}

// Paths in a config file are relative to the file, not the CWD.
std::string resolve_path(const fs::path& base, const std::string& path) {
    if (path.empty()) return path;
    fs::path p(path);
    if (p.is_absolute()) return path;
    return (base / p).lexically_normal().string();
}

}  // namespace

void apply_config_file(RunConfig& config, const std::string& path) {
    nlohmann::json j = nlohmann::json::parse(util::read_file(path), nullptr,
                                             /*allow_exceptions=*/false);
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object: " + path);
    const fs::path base = fs::path(path).parent_path();

    static const std::set<std::string> known = {
        "methods", "mode", "ssa_dir", "census_csv", "dict_file", "dataset", "cache_file",
        "fixtures_dir", "out_dir", "country_column", "endpoints", "keys", "thumbnails_k",
        "rate_limit_rps", "max_retries", "retry_base_ms", "min_country_instances", "workers",
        "dict_ignore_country",
    };
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw ConfigError("unknown config key `" + key + "` in " + path);

    if (j.contains("methods")) {
        if (!j["methods"].is_array()) throw ConfigError("config `methods` must be an array");
        std::vector<BackendId> methods;
        for (const auto& name : j["methods"]) {
            if (!name.is_string()) throw ConfigError("config `methods` must hold strings");
            auto id = backend_from_string(name.get<std::string>());
            if (!id) throw ConfigError("unknown method `" + name.get<std::string>() + "`");
            methods.push_back(*id);
        }
        config.methods = std::move(methods);
    }
    if (j.contains("mode")) {
        auto mode = run_mode_from_string(get_string(j, "mode"));
        if (!mode) throw ConfigError("mode must be live, cached or replay");
        config.mode = *mode;
    }
    if (j.contains("ssa_dir")) config.ssa_dir = resolve_path(base, get_string(j, "ssa_dir"));
    if (j.contains("census_csv"))
        config.census_csv = resolve_path(base, get_string(j, "census_csv"));
    if (j.contains("dict_file")) config.dict_file = resolve_path(base, get_string(j, "dict_file"));
    if (j.contains("dataset")) config.dataset_csv = resolve_path(base, get_string(j, "dataset"));
    if (j.contains("cache_file"))
        config.cache_file = resolve_path(base, get_string(j, "cache_file"));
    if (j.contains("fixtures_dir"))
        config.fixtures_dir = resolve_path(base, get_string(j, "fixtures_dir"));
    if (j.contains("out_dir")) config.out_dir = resolve_path(base, get_string(j, "out_dir"));
    if (j.contains("country_column")) config.country_column = get_string(j, "country_column");

    if (j.contains("endpoints")) {
        const auto& endpoints = j["endpoints"];
        if (!endpoints.is_object()) throw ConfigError("config `endpoints` must be an object");
        for (const auto& [key, value] : endpoints.items()) {
            if (!value.is_string()) throw ConfigError("endpoint `" + key + "` must be a string");
            if (key == "genderize")
                config.genderize_endpoint = value.get<std::string>();
            else if (key == "images")
                config.images_endpoint = value.get<std::string>();
            else if (key == "face")
                config.face_endpoint = value.get<std::string>();
            else
                throw ConfigError("unknown endpoint `" + key + "`");
        }
    }
    if (j.contains("keys")) {
        const auto& keys = j["keys"];
        if (!keys.is_object()) throw ConfigError("config `keys` must be an object");
        for (const auto& [key, value] : keys.items()) {
            if (!value.is_string()) throw ConfigError("key `" + key + "` must be a string");
            if (key == "genderize")
                config.genderize_key = value.get<std::string>();
            else if (key == "images")
                config.images_key = value.get<std::string>();
            else if (key == "face")
                config.face_key = value.get<std::string>();
            else
                throw ConfigError("unknown key entry `" + key + "`");
        }
    }

    auto get_int = [&j](const char* key) {
        if (!j[key].is_number_integer()) throw ConfigError(std::string("config `") + key +
                                                           "` must be an integer");
        return j[key].get<int>();
    };
    if (j.contains("thumbnails_k")) config.thumbnails_k = get_int("thumbnails_k");
    if (j.contains("rate_limit_rps")) {
        if (!j["rate_limit_rps"].is_number())
            throw ConfigError("config `rate_limit_rps` must be a number");
        config.rate_limit_rps = j["rate_limit_rps"].get<double>();
    }
    if (j.contains("max_retries")) config.max_retries = get_int("max_retries");
    if (j.contains("retry_base_ms")) config.retry_base_ms = get_int("retry_base_ms");
    if (j.contains("min_country_instances"))
        config.min_country_instances = get_int("min_country_instances");
    if (j.contains("workers")) config.workers = get_int("workers");
    if (j.contains("dict_ignore_country")) {
        if (!j["dict_ignore_country"].is_boolean())
            throw ConfigError("config `dict_ignore_country` must be a boolean");
        config.dict_ignore_country = j["dict_ignore_country"].get<bool>();
    }
}

void apply_env(RunConfig& config) {
    if (const char* v = std::getenv("NAMEGENDER_GENDERIZE_KEY")) config.genderize_key = v;
    if (const char* v = std::getenv("NAMEGENDER_FACE_KEY")) config.face_key = v;
    if (const char* v = std::getenv("NAMEGENDER_IMG_KEY")) config.images_key = v;
}

bool needs_web(BackendId method) {
    return method == BackendId::Genderize || method == BackendId::Face ||
           method == BackendId::Mixed1 || method == BackendId::Mixed2;
}

void validate(const RunConfig& config) {
    if (config.methods.empty()) throw ConfigError("no methods selected");
    if (config.thumbnails_k < 0 || config.thumbnails_k > 5)
        throw ConfigError("thumbnails_k must lie in [0,5]");
    if (!(config.rate_limit_rps > 0)) throw ConfigError("rate limit must be positive");
    if (config.workers < 1) throw ConfigError("workers must be >= 1");
    if (config.min_country_instances < 1)
        throw ConfigError("min-country-instances must be >= 1");

    bool any_web = false;
    for (BackendId method : config.methods) {
        any_web = any_web || needs_web(method);
        switch (method) {
            case BackendId::SSA:
                if (config.ssa_dir.empty())
                    throw ConfigError("method SSA needs --ssa-dir (or ssa_dir in the config)");
                break;
            case BackendId::Census:
                if (config.census_csv.empty())
                    throw ConfigError("method Census needs --census-csv");
                break;
            case BackendId::Dict:
                if (config.dict_file.empty()) throw ConfigError("method Dict needs --dict-file");
                break;
            default:
                break;
        }
    }

    bool image_backends_needed = false;
    for (BackendId method : config.methods)
        if (method == BackendId::Face || method == BackendId::Mixed1 ||
            method == BackendId::Mixed2)
            image_backends_needed = true;

    if (any_web && config.mode == RunMode::Replay && config.cache_file.empty() &&
        config.fixtures_dir.empty())
        throw ConfigError("replay mode requires --cache-file or --fixtures");
    if (config.mode != RunMode::Replay) {
        bool genderize_needed = false;
        for (BackendId method : config.methods)
            if (method == BackendId::Genderize || method == BackendId::Mixed1 ||
                method == BackendId::Mixed2)
                genderize_needed = true;
        if (genderize_needed && config.genderize_endpoint.empty())
            throw ConfigError("no genderize endpoint configured");
        if (image_backends_needed &&
            (config.images_endpoint.empty() || config.face_endpoint.empty()))
            throw ConfigError(
                "Face and Mixed methods need --endpoint-images and --endpoint-face outside "
                "replay mode");
    }
}

}  // namespace namegender
