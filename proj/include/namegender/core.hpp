#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace namegender {

// Five-way label. MostlyMale/MostlyFemale exist only as raw dictionary codes;
// every Prediction leaving a backend is Male, Female or Unknown.
enum class GenderLabel {
    Male,
    Female,
    MostlyMale,
    MostlyFemale,
    Unknown,
};

// Closed set. Enumeration order is the report column order.
enum class BackendId {
    SSA,
    Census,
    Dict,
    Genderize,
    Face,
    Mixed1,
    Mixed2,
};

inline constexpr BackendId kAllBackends[] = {
    BackendId::SSA,    BackendId::Census, BackendId::Dict,   BackendId::Genderize,
    BackendId::Face,   BackendId::Mixed1, BackendId::Mixed2,
};

std::string_view to_string(BackendId id);
std::string_view to_string(GenderLabel label);
std::optional<BackendId> backend_from_string(std::string_view name);

// One backend's verdict in the shared signed-score currency:
// score ∈ [-1,+1], positive = male, negative = female, 0 = abstain.
// The label is always determined by the sign.
struct Prediction {
    GenderLabel label = GenderLabel::Unknown;
    double score = 0.0;
    BackendId source = BackendId::SSA;

    bool is_abstain() const { return score == 0.0; }
    bool operator==(const Prediction&) const = default;
};

// Builds a Prediction enforcing the sign rule; throws ContractViolation if
// score is outside [-1,+1].
Prediction make_prediction(double score, BackendId source);

// score = 2*p_male - 1. Throws ContractViolation unless 0 <= p_male <= 1.
Prediction prediction_from_probability(double p_male, BackendId source);

Prediction abstain(BackendId source);

// A labeled individual from the evaluation dataset.
struct PersonRecord {
    std::string full_name;                // at least one non-whitespace char
    std::optional<std::string> country;   // ISO 3166-1 alpha-2, uppercase
    GenderLabel true_gender = GenderLabel::Male;  // Male or Female, never Unknown
};

// Validating constructor; throws ContractViolation on bad fields.
PersonRecord make_person_record(std::string full_name, std::optional<std::string> country,
                                GenderLabel true_gender);

}  // namespace namegender
