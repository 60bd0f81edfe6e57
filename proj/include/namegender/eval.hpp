#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "namegender/core.hpp"

namespace namegender {

// Abstention-aware confusion counts. Subscript is the true class:
// fp_f counts true males predicted female, abstain_f true females abstained.
struct ConfusionTally {
    long tp_f = 0, fp_f = 0, tp_m = 0, fp_m = 0, abstain_f = 0, abstain_m = 0;

    long true_female() const { return tp_f + fp_m + abstain_f; }
    long true_male() const { return tp_m + fp_f + abstain_m; }
    long total() const { return true_female() + true_male(); }
    long decided() const { return tp_f + fp_f + tp_m + fp_m; }

    // Cellwise sum; associative and commutative, so parallel batches can be
    // tallied independently and reduced.
    ConfusionTally& merge(const ConfusionTally& other);

    bool operator==(const ConfusionTally&) const = default;
};

// Per-class precision/recall/F1 plus overall accuracy and coverage.
// Abstentions count against recall and accuracy but not precision. A
// zero-denominator precision or recall is reported as 1.0 with its
// zero-support flag set.
struct MetricsRow {
    double precision_f = 0, recall_f = 0, f1_f = 0;
    double precision_m = 0, recall_m = 0, f1_m = 0;
    double accuracy = 0;
    double coverage = 0;
    bool precision_f_zero_support = false;
    bool precision_m_zero_support = false;
    bool recall_f_zero_support = false;
    bool recall_m_zero_support = false;
};

struct MethodReport {
    std::vector<std::pair<BackendId, MetricsRow>> rows;  // BackendId enumeration order
};

// Accuracy per country per backend, abstentions counting as errors. Rows are
// sorted by instance count descending (ties alphabetical); countries with
// fewer than min_instances records, and records without a country, pool into
// a final "other" row.
struct CountryRow {
    std::string country;
    long instances = 0;
    std::vector<double> accuracy;  // aligned with CountryReport::methods
    std::vector<long> correct;     // raw correct counts behind `accuracy`
};

struct CountryReport {
    std::vector<BackendId> methods;
    std::vector<CountryRow> rows;
};

// Requires every prediction label to be Male, Female or Unknown (the raw
// dictionary labels never reach evaluation).
ConfusionTally tally(std::span<const std::pair<PersonRecord, Prediction>> records);

// 2PR/(P+R), 0 when P+R = 0.
double f1_score(double precision, double recall);

// Throws EmptyDatasetError when the tally is empty.
MetricsRow metrics(const ConfusionTally& tally);

// (recall_f*n_f + recall_m*n_m) / (n_f + n_m): the algebraic identity tying
// per-class recalls to overall accuracy. Class counts must be positive.
double accuracy_identity_check(double recall_f, double recall_m, long n_f, long n_m);

// One prediction per (method, record); preds[i] is aligned with records.
CountryReport country_breakdown(
    std::span<const PersonRecord> records,
    const std::vector<std::pair<BackendId, std::vector<Prediction>>>& preds,
    int min_instances = 20);

}  // namespace namegender
