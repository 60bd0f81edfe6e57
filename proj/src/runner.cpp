#include "namegender/runner.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "namegender/dataset.hpp"
#include "namegender/errors.hpp"
#include "namegender/fusion.hpp"
#include "namegender/normalize.hpp"
#include "namegender/util.hpp"

namespace fs = std::filesystem;

namespace namegender {

namespace {

bool method_requested(const RunConfig& config, BackendId method) {
    return std::find(config.methods.begin(), config.methods.end(), method) !=
           config.methods.end();
}

std::vector<BackendId> canonical_methods(const std::vector<BackendId>& methods) {
    std::vector<BackendId> out;
    for (BackendId id : kAllBackends)
        if (std::find(methods.begin(), methods.end(), id) != methods.end()) out.push_back(id);
    return out;
}

}  // namespace

Backends open_backends(const RunConfig& config, std::shared_ptr<Transport> transport_override) {
    validate(config);
    Backends backends;
    if (method_requested(config, BackendId::SSA)) backends.ssa = parse_ssa_dir(config.ssa_dir);
    if (method_requested(config, BackendId::Census))
        backends.census = parse_census_csv(config.census_csv);
    if (method_requested(config, BackendId::Dict))
        backends.dict = parse_dict_file(config.dict_file);

    bool web = false;
    for (BackendId method : config.methods) web = web || needs_web(method);
    if (web) {
        if (!config.cache_file.empty())
            backends.cache = std::make_shared<ResponseCache>(config.cache_file);
        backends.web = std::make_unique<WebClients>(config.client_config(), backends.cache,
                                                    std::move(transport_override));
    }
    return backends;
}

std::vector<Prediction> predict_record(Backends& backends, const RunConfig& config,
                                       const PersonRecord& person) {
    NameKey key = extract_first_name(person.full_name);

    std::optional<Prediction> genderize_pred;
    auto genderize = [&]() -> const Prediction& {
        if (!genderize_pred)
            genderize_pred = backends.web->genderize_lookup(key.primary, person.country);
        return *genderize_pred;
    };
    std::optional<Prediction> face_pred;
    auto face = [&]() -> const Prediction& {
        if (!face_pred) face_pred = backends.web->face_prediction(image_query(person.full_name));
        return *face_pred;
    };

    std::vector<Prediction> out;
    out.reserve(config.methods.size());
    for (BackendId method : config.methods) {
        switch (method) {
            case BackendId::SSA:
                out.push_back(lookup_counts(*backends.ssa, key));
                break;
            case BackendId::Census:
                out.push_back(lookup_counts(*backends.census, key));
                break;
            case BackendId::Dict:
                out.push_back(lookup_dict(
                    *backends.dict, key,
                    config.dict_ignore_country ? std::nullopt : person.country));
                break;
            case BackendId::Genderize:
                out.push_back(genderize());
                break;
            case BackendId::Face:
                out.push_back(face());
                break;
            case BackendId::Mixed1:
                out.push_back(mixed1(genderize(), [&face] { return face(); }));
                break;
            case BackendId::Mixed2:
                out.push_back(mixed2(genderize(), face()));
                break;
        }
    }
    return out;
}

EvaluationResult run_evaluation(const RunConfig& config,
                                std::shared_ptr<Transport> transport_override) {
    if (config.dataset_csv.empty()) throw ConfigError("evaluate needs a dataset (--dataset)");
    RunConfig run = config;
    run.methods = canonical_methods(config.methods);
    Backends backends = open_backends(run, std::move(transport_override));

    EvaluationResult result;
    result.records = load_dataset(run.dataset_csv, run.country_column);
    result.methods = run.methods;
    result.predictions.assign(result.methods.size(),
                              std::vector<Prediction>(result.records.size()));

    const size_t n = result.records.size();
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= n) return;
            {
                std::lock_guard lock(error_mutex);
                if (first_error) return;
            }
            try {
                auto preds = predict_record(backends, run, result.records[i]);
                for (size_t m = 0; m < preds.size(); ++m) result.predictions[m][i] = preds[m];
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    int workers = std::min<int>(run.workers, static_cast<int>(n));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<size_t>(workers));
        for (int i = 0; i < workers; ++i) threads.emplace_back(worker);
        for (auto& thread : threads) thread.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<std::pair<BackendId, std::vector<Prediction>>> aligned;
    for (size_t m = 0; m < result.methods.size(); ++m) {
        std::vector<std::pair<PersonRecord, Prediction>> pairs;
        pairs.reserve(n);
        for (size_t i = 0; i < n; ++i)
            pairs.emplace_back(result.records[i], result.predictions[m][i]);
        result.method_report.rows.emplace_back(result.methods[m], metrics(tally(pairs)));
        aligned.emplace_back(result.methods[m], result.predictions[m]);
    }
    result.country_report =
        country_breakdown(result.records, aligned, run.min_country_instances);
    return result;
}

namespace {

void append_metric(std::string& out, BackendId method, const char* metric,
                   const std::string& value) {
    out += to_string(method);
    out += '\t';
    out += metric;
    out += '\t';
    out += value;
    out += '\n';
}

}  // namespace

std::string render_method_report_tsv(const EvaluationResult& result) {
    std::string out = "method\tmetric\tvalue\n";
    for (size_t m = 0; m < result.methods.size(); ++m) {
        BackendId method = result.methods[m];
        std::vector<std::pair<PersonRecord, Prediction>> pairs;
        for (size_t i = 0; i < result.records.size(); ++i)
            pairs.emplace_back(result.records[i], result.predictions[m][i]);
        ConfusionTally t = tally(pairs);
        const MetricsRow& row = result.method_report.rows[m].second;

        append_metric(out, method, "tp_f", std::to_string(t.tp_f));
        append_metric(out, method, "fp_f", std::to_string(t.fp_f));
        append_metric(out, method, "tp_m", std::to_string(t.tp_m));
        append_metric(out, method, "fp_m", std::to_string(t.fp_m));
        append_metric(out, method, "abstain_f", std::to_string(t.abstain_f));
        append_metric(out, method, "abstain_m", std::to_string(t.abstain_m));
        append_metric(out, method, "precision_f", util::double_to_string(row.precision_f));
        append_metric(out, method, "recall_f", util::double_to_string(row.recall_f));
        append_metric(out, method, "f1_f", util::double_to_string(row.f1_f));
        append_metric(out, method, "precision_m", util::double_to_string(row.precision_m));
        append_metric(out, method, "recall_m", util::double_to_string(row.recall_m));
        append_metric(out, method, "f1_m", util::double_to_string(row.f1_m));
        append_metric(out, method, "accuracy", util::double_to_string(row.accuracy));
        append_metric(out, method, "coverage", util::double_to_string(row.coverage));
        append_metric(out, method, "precision_f_zero_support",
                      row.precision_f_zero_support ? "1" : "0");
        append_metric(out, method, "precision_m_zero_support",
                      row.precision_m_zero_support ? "1" : "0");
        append_metric(out, method, "recall_f_zero_support",
                      row.recall_f_zero_support ? "1" : "0");
        append_metric(out, method, "recall_m_zero_support",
                      row.recall_m_zero_support ? "1" : "0");
    }
    return out;
}

std::string render_country_report_tsv(const EvaluationResult& result) {
    std::string out = "country\tinstances\tmethod\taccuracy\n";
    for (const CountryRow& row : result.country_report.rows) {
        for (size_t m = 0; m < result.country_report.methods.size(); ++m) {
            out += row.country;
            out += '\t';
            out += std::to_string(row.instances);
            out += '\t';
            out += to_string(result.country_report.methods[m]);
            out += '\t';
            out += util::double_to_string(row.accuracy[m]);
            out += '\n';
        }
    }
    return out;
}

std::string render_predictions_csv(const EvaluationResult& result) {
    std::string out = "index,full_name,country,gender,method,label,score\n";
    for (size_t i = 0; i < result.records.size(); ++i) {
        const PersonRecord& person = result.records[i];
        for (size_t m = 0; m < result.methods.size(); ++m) {
            const Prediction& p = result.predictions[m][i];
            out += std::to_string(i);
            out += ',';
            out += util::csv_escape(person.full_name);
            out += ',';
            out += person.country.value_or("");
            out += ',';
            out += person.true_gender == GenderLabel::Female ? 'F' : 'M';
            out += ',';
            out += to_string(result.methods[m]);
            out += ',';
            out += to_string(p.label);
            out += ',';
            out += util::double_to_string(p.score);
            out += '\n';
        }
    }
    return out;
}

namespace {

std::string pad_left(const std::string& text, size_t width) {
    if (text.size() >= width) return text;
    return std::string(width - text.size(), ' ') + text;
}

std::string pad_right(const std::string& text, size_t width) {
    if (text.size() >= width) return text;
    return text + std::string(width - text.size(), ' ');
}

}  // namespace

std::string render_human_report(const EvaluationResult& result) {
    constexpr size_t kCol = 11;
    std::ostringstream out;
    out << "Gender detection evaluation (" << result.records.size() << " records)\n\n";

    out << "Per-class and overall precision and recall\n";
    out << pad_right("metric", 18);
    for (BackendId method : result.methods) out << pad_left(std::string(to_string(method)), kCol);
    out << '\n';

    bool any_zero_support = false;
    auto metric_line = [&](const char* name, auto getter) {
        out << pad_right(name, 18);
        for (const auto& [method, row] : result.method_report.rows) {
            auto [value, flagged] = getter(row);
            any_zero_support = any_zero_support || flagged;
            out << pad_left(util::double_fixed(value, 2) + (flagged ? "*" : ""), kCol);
        }
        out << '\n';
    };
    metric_line("female precision", [](const MetricsRow& r) {
        return std::pair(r.precision_f, r.precision_f_zero_support);
    });
    metric_line("female recall", [](const MetricsRow& r) {
        return std::pair(r.recall_f, r.recall_f_zero_support);
    });
    metric_line("female F1", [](const MetricsRow& r) { return std::pair(r.f1_f, false); });
    metric_line("male precision", [](const MetricsRow& r) {
        return std::pair(r.precision_m, r.precision_m_zero_support);
    });
    metric_line("male recall", [](const MetricsRow& r) {
        return std::pair(r.recall_m, r.recall_m_zero_support);
    });
    metric_line("male F1", [](const MetricsRow& r) { return std::pair(r.f1_m, false); });
    metric_line("accuracy", [](const MetricsRow& r) { return std::pair(r.accuracy, false); });
    metric_line("coverage", [](const MetricsRow& r) { return std::pair(r.coverage, false); });
    if (any_zero_support)
        out << "* no decided (precision) or true (recall) instances; reported as 1.00\n";

    if (!result.country_report.rows.empty()) {
        out << "\nAccuracy by country\n";
        out << pad_right("country", 8) << pad_left("instances", 10);
        for (BackendId method : result.country_report.methods)
            out << pad_left(std::string(to_string(method)), kCol);
        out << '\n';
        for (const CountryRow& row : result.country_report.rows) {
            out << pad_right(row.country, 8) << pad_left(std::to_string(row.instances), 10);
            for (double accuracy : row.accuracy)
                out << pad_left(util::double_fixed(accuracy, 2), kCol);
            out << '\n';
        }
    }
    return out.str();
}

void write_reports(const EvaluationResult& result, const std::string& out_dir) {
    fs::create_directories(out_dir);
    fs::path dir(out_dir);
    util::write_file((dir / "method_report.tsv").string(), render_method_report_tsv(result));
    util::write_file((dir / "country_report.tsv").string(), render_country_report_tsv(result));
    util::write_file((dir / "predictions.csv").string(), render_predictions_csv(result));
    util::write_file((dir / "report.txt").string(), render_human_report(result));
}

EvaluationResult load_predictions_csv(const std::string& path, int min_country_instances) {
    std::string body = util::read_file(path);
    auto rows = util::parse_csv(body, path);
    if (rows.empty()) throw ParseError(path, 1, 1, "missing predictions header");
    const std::vector<std::string> expected = {"index", "full_name", "country", "gender",
                                               "method", "label",     "score"};
    if (rows[0] != expected)
        throw ParseError(path, 1, 1,
                         "header must be `index,full_name,country,gender,method,label,score`");

    EvaluationResult result;
    std::map<long, size_t> record_pos;
    std::vector<long> record_indexes;  // original index per records position
    std::map<BackendId, std::map<long, Prediction>> by_method;

    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        long line_no = static_cast<long>(i) + 1;
        if (row.size() != 7) throw ParseError(path, line_no, 1, "expected 7 fields");

        long index = 0;
        try {
            index = std::stol(row[0]);
        } catch (const std::exception&) {
            throw ParseError(path, line_no, 1, "bad index `" + row[0] + "`");
        }
        GenderLabel truth;
        if (row[3] == "F")
            truth = GenderLabel::Female;
        else if (row[3] == "M")
            truth = GenderLabel::Male;
        else
            throw ParseError(path, line_no, 1, "gender must be M or F");
        auto method = backend_from_string(row[4]);
        if (!method) throw ParseError(path, line_no, 1, "unknown method `" + row[4] + "`");

        double score = 0;
        try {
            score = std::stod(row[6]);
        } catch (const std::exception&) {
            throw ParseError(path, line_no, 1, "bad score `" + row[6] + "`");
        }
        Prediction prediction;
        try {
            prediction = make_prediction(score, *method);
        } catch (const ContractViolation& e) {
            throw ParseError(path, line_no, 1, e.what());
        }
        if (std::string(to_string(prediction.label)) != row[5])
            throw ParseError(path, line_no, 1,
                             "label `" + row[5] + "` inconsistent with score " + row[6]);

        if (!record_pos.count(index)) {
            std::optional<std::string> country;
            if (!row[2].empty()) country = row[2];
            record_pos[index] = result.records.size();
            record_indexes.push_back(index);
            try {
                result.records.push_back(make_person_record(row[1], std::move(country), truth));
            } catch (const ContractViolation& e) {
                throw ParseError(path, line_no, 1, e.what());
            }
        }
        by_method[*method][index] = prediction;
    }
    if (result.records.empty()) throw EmptyDatasetError("no prediction rows in " + path);

    std::vector<std::pair<BackendId, std::vector<Prediction>>> aligned;
    for (auto& [method, predictions] : by_method) {
        if (predictions.size() != result.records.size())
            throw ParseError(path, 1, 1,
                             std::string("method ") + std::string(to_string(method)) +
                                 " does not cover every record");
        result.methods.push_back(method);
        std::vector<Prediction> ordered;
        for (long index : record_indexes) {
            auto it = predictions.find(index);
            if (it == predictions.end())
                throw ParseError(path, 1, 1,
                                 std::string("method ") + std::string(to_string(method)) +
                                     " is missing record index " + std::to_string(index));
            ordered.push_back(it->second);
        }
        result.predictions.push_back(ordered);
        std::vector<std::pair<PersonRecord, Prediction>> pairs;
        for (size_t i = 0; i < result.records.size(); ++i)
            pairs.emplace_back(result.records[i], ordered[i]);
        result.method_report.rows.emplace_back(method, metrics(tally(pairs)));
        aligned.emplace_back(method, std::move(ordered));
    }
    result.country_report =
        country_breakdown(result.records, aligned, min_country_instances);
    return result;
}

}  // namespace namegender
