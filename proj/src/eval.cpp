#include "namegender/eval.hpp"

#include <algorithm>
#include <map>

#include "namegender/errors.hpp"

namespace namegender {

ConfusionTally& ConfusionTally::merge(const ConfusionTally& other) {
    tp_f += other.tp_f;
    fp_f += other.fp_f;
    tp_m += other.tp_m;
    fp_m += other.fp_m;
    abstain_f += other.abstain_f;
    abstain_m += other.abstain_m;
    return *this;
}

ConfusionTally tally(std::span<const std::pair<PersonRecord, Prediction>> records) {
    ConfusionTally t;
    for (const auto& [person, prediction] : records) {
        bool true_female = person.true_gender == GenderLabel::Female;
        switch (prediction.label) {
            case GenderLabel::Unknown:
                ++(true_female ? t.abstain_f : t.abstain_m);
                break;
            case GenderLabel::Female:
                ++(true_female ? t.tp_f : t.fp_f);
                break;
            case GenderLabel::Male:
                ++(true_female ? t.fp_m : t.tp_m);
                break;
            default:
                throw ContractViolation("raw dictionary labels cannot be tallied");
        }
    }
    return t;
}

double f1_score(double precision, double recall) {
    double sum = precision + recall;
    if (sum == 0.0) return 0.0;
    return 2.0 * precision * recall / sum;
}

namespace {

double ratio_or_one(long numerator, long denominator, bool& zero_support) {
    if (denominator == 0) {
        zero_support = true;
        return 1.0;
    }
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

}  // namespace

MetricsRow metrics(const ConfusionTally& t) {
    long n = t.total();
    if (n == 0) throw EmptyDatasetError("cannot compute metrics over an empty tally");

    MetricsRow row;
    row.precision_f = ratio_or_one(t.tp_f, t.tp_f + t.fp_f, row.precision_f_zero_support);
    row.precision_m = ratio_or_one(t.tp_m, t.tp_m + t.fp_m, row.precision_m_zero_support);
    row.recall_f = ratio_or_one(t.tp_f, t.true_female(), row.recall_f_zero_support);
    row.recall_m = ratio_or_one(t.tp_m, t.true_male(), row.recall_m_zero_support);
    row.f1_f = f1_score(row.precision_f, row.recall_f);
    row.f1_m = f1_score(row.precision_m, row.recall_m);
    row.accuracy = static_cast<double>(t.tp_f + t.tp_m) / static_cast<double>(n);
    row.coverage = static_cast<double>(t.decided()) / static_cast<double>(n);
    return row;
}

double accuracy_identity_check(double recall_f, double recall_m, long n_f, long n_m) {
    if (n_f <= 0 || n_m <= 0) throw ContractViolation("class counts must be positive");
    return (recall_f * static_cast<double>(n_f) + recall_m * static_cast<double>(n_m)) /
           static_cast<double>(n_f + n_m);
}

CountryReport country_breakdown(
    std::span<const PersonRecord> records,
    const std::vector<std::pair<BackendId, std::vector<Prediction>>>& preds,
    int min_instances) {
    if (min_instances < 1) throw ContractViolation("min_instances must be >= 1");
    for (const auto& [backend, predictions] : preds)
        if (predictions.size() != records.size())
            throw ContractViolation("predictions for " + std::string(to_string(backend)) +
                                    " are not aligned with the records");

    const size_t n_methods = preds.size();
    struct Bucket {
        long instances = 0;
        std::vector<long> correct;
    };
    std::map<std::string, Bucket> buckets;
    Bucket other;
    other.correct.assign(n_methods, 0);

    auto add_record = [&](Bucket& bucket, size_t record_idx) {
        ++bucket.instances;
        for (size_t m = 0; m < n_methods; ++m) {
            const Prediction& p = preds[m].second[record_idx];
            if (p.label == records[record_idx].true_gender) ++bucket.correct[m];
        }
    };

    for (size_t i = 0; i < records.size(); ++i) {
        if (!records[i].country) {
            add_record(other, i);
            continue;
        }
        Bucket& bucket = buckets[*records[i].country];
        if (bucket.correct.empty()) bucket.correct.assign(n_methods, 0);
        add_record(bucket, i);
    }

    // Pool small countries into "other".
    for (auto it = buckets.begin(); it != buckets.end();) {
        if (it->second.instances < min_instances) {
            other.instances += it->second.instances;
            for (size_t m = 0; m < n_methods; ++m) other.correct[m] += it->second.correct[m];
            it = buckets.erase(it);
        } else {
            ++it;
        }
    }

    CountryReport report;
    for (const auto& [backend, predictions] : preds) report.methods.push_back(backend);

    std::vector<std::pair<std::string, Bucket>> ordered(buckets.begin(), buckets.end());
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        if (a.second.instances != b.second.instances) return a.second.instances > b.second.instances;
        return a.first < b.first;
    });
    if (other.instances > 0) ordered.emplace_back("other", std::move(other));

    for (auto& [country, bucket] : ordered) {
        CountryRow row;
        row.country = country;
        row.instances = bucket.instances;
        row.correct = bucket.correct;
        for (size_t m = 0; m < n_methods; ++m)
            row.accuracy.push_back(static_cast<double>(bucket.correct[m]) /
                                   static_cast<double>(bucket.instances));
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace namegender
