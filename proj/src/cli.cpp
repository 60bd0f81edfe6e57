#include "namegender/cli.hpp"

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "namegender/config.hpp"
#include "namegender/dataset.hpp"
#include "namegender/errors.hpp"
#include "namegender/normalize.hpp"
#include "namegender/runner.hpp"
#include "namegender/util.hpp"

namespace namegender {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CliOptions {
    std::string config_file;
    std::string methods;
    std::string mode;
    RunConfig config;  // flag targets; merged over file/env/defaults after parsing

    // Track which flags the user actually set so precedence holds.
    CLI::App* app = nullptr;
};

void add_common_flags(CLI::App& cmd, CliOptions& opts) {
    cmd.add_option("--config", opts.config_file, "JSON config file");
    cmd.add_option("--methods", opts.methods,
                   "comma-separated methods (ssa,census,dict,genderize,face,mixed1,mixed2)");
    cmd.add_option("--mode", opts.mode, "live, cached or replay");
    cmd.add_option("--ssa-dir", opts.config.ssa_dir, "directory of yobYYYY.txt files");
    cmd.add_option("--census-csv", opts.config.census_csv, "census aggregate CSV");
    cmd.add_option("--dict-file", opts.config.dict_file, "fixed-width name dictionary");
    cmd.add_option("--cache-file", opts.config.cache_file, "JSONL response cache");
    cmd.add_option("--fixtures", opts.config.fixtures_dir, "thumbnail fixtures directory");
    cmd.add_option("--endpoint-genderize", opts.config.genderize_endpoint);
    cmd.add_option("--endpoint-face", opts.config.face_endpoint);
    cmd.add_option("--endpoint-images", opts.config.images_endpoint);
    cmd.add_option("--country-column", opts.config.country_column,
                   "dataset column holding the country code");
    cmd.add_option("--min-country-instances", opts.config.min_country_instances,
                   "pool smaller countries into `other`");
    cmd.add_option("--thumbnails-k", opts.config.thumbnails_k, "thumbnails per query (0-5)");
    cmd.add_option("--rate-limit", opts.config.rate_limit_rps, "requests/second per backend");
    cmd.add_option("--workers", opts.config.workers, "concurrent records in evaluate");
    cmd.add_flag("--dict-ignore-country", opts.config.dict_ignore_country,
                 "dictionary lookups ignore the record's country");
}

// flags > env > config file > defaults: start from defaults, overlay the
// file, then env, then re-apply any flag the user passed.
RunConfig resolve_config(CLI::App& cmd, CliOptions& opts) {
    RunConfig flags = opts.config;  // values as left by CLI11 (flags applied)
    RunConfig merged;               // defaults
    if (!opts.config_file.empty()) apply_config_file(merged, opts.config_file);
    apply_env(merged);

    auto used = [&cmd](const std::string& name) { return cmd.count(name) > 0; };
    if (used("--ssa-dir")) merged.ssa_dir = flags.ssa_dir;
    if (used("--census-csv")) merged.census_csv = flags.census_csv;
    if (used("--dict-file")) merged.dict_file = flags.dict_file;
    if (used("--cache-file")) merged.cache_file = flags.cache_file;
    if (used("--fixtures")) merged.fixtures_dir = flags.fixtures_dir;
    if (used("--endpoint-genderize")) merged.genderize_endpoint = flags.genderize_endpoint;
    if (used("--endpoint-face")) merged.face_endpoint = flags.face_endpoint;
    if (used("--endpoint-images")) merged.images_endpoint = flags.images_endpoint;
    if (used("--country-column")) merged.country_column = flags.country_column;
    if (used("--min-country-instances"))
        merged.min_country_instances = flags.min_country_instances;
    if (used("--thumbnails-k")) merged.thumbnails_k = flags.thumbnails_k;
    if (used("--rate-limit")) merged.rate_limit_rps = flags.rate_limit_rps;
    if (used("--workers")) merged.workers = flags.workers;
    if (used("--dict-ignore-country")) merged.dict_ignore_country = flags.dict_ignore_country;

    if (!opts.mode.empty()) {
        auto mode = run_mode_from_string(opts.mode);
        if (!mode) throw ConfigError("mode must be live, cached or replay");
        merged.mode = *mode;
    }
    if (!opts.methods.empty()) {
        std::vector<BackendId> methods;
        for (const auto& name : util::split(opts.methods, ',')) {
            auto id = backend_from_string(std::string(util::trim(name)));
            if (!id) throw ConfigError("unknown method `" + std::string(util::trim(name)) + "`");
            methods.push_back(*id);
        }
        merged.methods = std::move(methods);
    }
    return merged;
}

int cmd_infer(const std::string& name, const std::string& country_flag, RunConfig config) {
    if (util::trim(name).empty()) throw ConfigError("infer needs a non-empty name");
    std::optional<std::string> country;
    if (!country_flag.empty()) country = country_flag;

    Backends backends = open_backends(config);
    PersonRecord person{name, country, GenderLabel::Male};  // true gender unused here
    std::vector<Prediction> predictions = predict_record(backends, config, person);
    for (size_t i = 0; i < predictions.size(); ++i) {
        std::cout << to_string(config.methods[i]) << '\t' << to_string(predictions[i].label)
                  << '\t' << util::double_to_string(predictions[i].score) << '\n';
    }
    return kExitOk;
}

int cmd_evaluate(RunConfig config) {
    EvaluationResult result = run_evaluation(config);
    write_reports(result, config.out_dir);
    std::cout << render_human_report(result);
    std::cout << "\nreports written to " << config.out_dir << "\n";
    return kExitOk;
}

int cmd_report(const std::string& predictions_path, const RunConfig& config) {
    EvaluationResult result =
        load_predictions_csv(predictions_path, config.min_country_instances);
    write_reports(result, config.out_dir);
    std::cout << render_human_report(result);
    std::cout << "\nreports written to " << config.out_dir << "\n";
    return kExitOk;
}

int cmd_cache(const std::string& action, RunConfig config) {
    if (config.cache_file.empty()) throw ConfigError("cache commands need --cache-file");

    if (action == "stats") {
        ResponseCache cache(config.cache_file);
        auto stats = cache.stats();
        std::cout << "records\t" << stats.records << "\n";
        std::cout << "entries\t" << stats.total_entries() << "\n";
        for (const auto& [backend, count] : stats.entries)
            std::cout << to_string(backend) << '\t' << count << '\n';
        return kExitOk;
    }
    if (action == "prune") {
        ResponseCache cache(config.cache_file);
        long before = cache.stats().records;
        long dropped = cache.prune();
        std::cout << "pruned " << dropped << " of " << before << " records, "
                  << cache.stats().records << " remain\n";
        return kExitOk;
    }
    if (action == "warm") {
        if (config.dataset_csv.empty()) throw ConfigError("cache warm needs --dataset");
        bool genderize = false;
        bool images = false;
        for (BackendId method : config.methods) {
            if (method == BackendId::Genderize || method == BackendId::Mixed1 ||
                method == BackendId::Mixed2)
                genderize = true;
            if (method == BackendId::Face || method == BackendId::Mixed1 ||
                method == BackendId::Mixed2)
                images = true;
        }
        if (genderize && config.genderize_key.empty())
            throw ConfigError("cache warm needs NAMEGENDER_GENDERIZE_KEY");
        if (images && (config.images_key.empty() || config.face_key.empty()))
            throw ConfigError("cache warm needs NAMEGENDER_IMG_KEY and NAMEGENDER_FACE_KEY");

        config.mode = RunMode::Live;
        validate(config);
        Backends backends = open_backends(config);
        auto records = load_dataset(config.dataset_csv, config.country_column);
        long fetched = 0;
        for (const PersonRecord& person : records) {
            NameKey key = extract_first_name(person.full_name);
            if (genderize) backends.web->genderize_lookup(key.primary, person.country);
            if (images) backends.web->face_prediction(image_query(person.full_name));
            ++fetched;
        }
        std::cout << "warmed cache for " << fetched << " records\n";
        return kExitOk;
    }
    throw ConfigError("cache action must be stats, prune or warm");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"name- and image-based gender inference toolkit"};
    app.require_subcommand(1);

    CliOptions opts;

    auto* infer = app.add_subcommand("infer", "infer the gender behind one name");
    std::string infer_name;
    std::string infer_country;
    infer->add_option("name", infer_name, "full name to classify")->required();
    infer->add_option("--country", infer_country, "ISO 3166-1 alpha-2 country code");
    add_common_flags(*infer, opts);

    auto* evaluate = app.add_subcommand("evaluate", "score every method against a labeled dataset");
    evaluate->add_option("--dataset", opts.config.dataset_csv, "labeled CSV dataset");
    evaluate->add_option("--out-dir", opts.config.out_dir, "report output directory");
    add_common_flags(*evaluate, opts);

    auto* report = app.add_subcommand("report", "regenerate reports from a predictions.csv");
    std::string predictions_path;
    report->add_option("--predictions", predictions_path, "predictions.csv from evaluate")
        ->required();
    report->add_option("--out-dir", opts.config.out_dir, "report output directory");
    add_common_flags(*report, opts);

    auto* cache = app.add_subcommand("cache", "inspect or maintain the response cache");
    std::string cache_action;
    cache->add_option("action", cache_action, "stats, prune or warm")->required();
    cache->add_option("--dataset", opts.config.dataset_csv, "dataset for `warm`");
    add_common_flags(*cache, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        CLI::App* cmd = app.get_subcommands().front();
        RunConfig config = resolve_config(*cmd, opts);
        if (cmd == infer) {
            return cmd_infer(infer_name, infer_country, std::move(config));
        }
        if (cmd == evaluate) {
            if (cmd->count("--dataset")) config.dataset_csv = opts.config.dataset_csv;
            if (cmd->count("--out-dir")) config.out_dir = opts.config.out_dir;
            return cmd_evaluate(std::move(config));
        }
        if (cmd == report) {
            if (cmd->count("--out-dir")) config.out_dir = opts.config.out_dir;
            return cmd_report(predictions_path, config);
        }
        if (cmd == cache) {
            if (cmd->count("--dataset")) config.dataset_csv = opts.config.dataset_csv;
            return cmd_cache(cache_action, std::move(config));
        }
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "namegender: config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const EmptyNameError& e) {
        std::cerr << "namegender: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ContractViolation& e) {
        std::cerr << "namegender: internal error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "namegender: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace namegender
