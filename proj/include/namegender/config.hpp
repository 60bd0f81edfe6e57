#pragma once

#include <optional>
#include <string>
#include <vector>

#include "namegender/core.hpp"
#include "namegender/webclients.hpp"

namespace namegender {

// Resolved run configuration. Populated in precedence order
// flags > environment > config file > defaults; paths read from a config
// file are resolved relative to that file's directory.
struct RunConfig {
    std::vector<BackendId> methods = {kAllBackends, kAllBackends + 7};
    RunMode mode = RunMode::Replay;

    std::string ssa_dir;
    std::string census_csv;
    std::string dict_file;
    std::string dataset_csv;
    std::string cache_file;
    std::string fixtures_dir;
    std::string out_dir = "reports";
    std::string country_column = "country";

    std::string genderize_endpoint = "https://api.genderize.io";
    std::string images_endpoint;
    std::string face_endpoint;
    std::string genderize_key;
    std::string images_key;
    std::string face_key;

    int thumbnails_k = 5;
    double rate_limit_rps = 1.0;
    int max_retries = 5;
    int retry_base_ms = 500;
    int min_country_instances = 20;
    int workers = 1;
    bool dict_ignore_country = false;

    ClientConfig client_config() const;
};

// Merges a JSON config file into `config` (only keys present in the file are
// touched). Throws ConfigError on unknown keys or bad values.
void apply_config_file(RunConfig& config, const std::string& path);

// Reads NAMEGENDER_GENDERIZE_KEY / NAMEGENDER_FACE_KEY / NAMEGENDER_IMG_KEY.
void apply_env(RunConfig& config);

// Cross-field checks shared by every subcommand: replay needs a cache file
// or fixtures, mixed methods need their constituents, ranges. Throws
// ConfigError.
void validate(const RunConfig& config);

// True when running `method` needs the web stack (Genderize/Face/Mixed*).
bool needs_web(BackendId method);

}  // namespace namegender
