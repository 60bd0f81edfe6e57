#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "namegender/cache.hpp"
#include "namegender/config.hpp"
#include "namegender/core.hpp"
#include "namegender/eval.hpp"
#include "namegender/namedb.hpp"
#include "namegender/webclients.hpp"

namespace namegender {

// The opened resources a run needs: only what config.methods asks for is
// loaded. Lookups and web calls through this are thread-safe.
struct Backends {
    std::optional<NameDatabase> ssa;
    std::optional<NameDatabase> census;
    std::optional<NameDatabase> dict;
    std::shared_ptr<ResponseCache> cache;
    std::unique_ptr<WebClients> web;
};

Backends open_backends(const RunConfig& config,
                       std::shared_ptr<Transport> transport_override = nullptr);

// One prediction per requested method, in config.methods order. The face
// pipeline runs at most once per record and only when a requested method
// actually needs it (Mixed1 pulls it only for Genderize abstentions).
std::vector<Prediction> predict_record(Backends& backends, const RunConfig& config,
                                       const PersonRecord& person);

struct EvaluationResult {
    std::vector<PersonRecord> records;
    std::vector<BackendId> methods;                    // BackendId enumeration order
    std::vector<std::vector<Prediction>> predictions;  // methods x records
    MethodReport method_report;
    CountryReport country_report;
};

// Loads the dataset, predicts every record with every configured method
// (config.workers threads) and aggregates the reports.
EvaluationResult run_evaluation(const RunConfig& config,
                                std::shared_ptr<Transport> transport_override = nullptr);

// Rebuilds an EvaluationResult from a predictions.csv written by
// write_reports; reports regenerate byte-identically for the same inputs.
EvaluationResult load_predictions_csv(const std::string& path, int min_country_instances);

// Deterministic report renderings: the same result yields the same bytes.
std::string render_method_report_tsv(const EvaluationResult& result);
std::string render_country_report_tsv(const EvaluationResult& result);
std::string render_predictions_csv(const EvaluationResult& result);
std::string render_human_report(const EvaluationResult& result);

// Writes method_report.tsv, country_report.tsv, predictions.csv and
// report.txt into out_dir (created if needed).
void write_reports(const EvaluationResult& result, const std::string& out_dir);

}  // namespace namegender
