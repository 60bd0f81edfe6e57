#include "namegender/core.hpp"

#include <cctype>

#include "namegender/errors.hpp"
#include "namegender/util.hpp"

namespace namegender {

std::string_view to_string(BackendId id) {
    switch (id) {
        case BackendId::SSA: return "SSA";
        case BackendId::Census: return "Census";
        case BackendId::Dict: return "Dict";
        case BackendId::Genderize: return "Genderize";
        case BackendId::Face: return "Face";
        case BackendId::Mixed1: return "Mixed1";
        case BackendId::Mixed2: return "Mixed2";
    }
    return "?";
}

std::string_view to_string(GenderLabel label) {
    switch (label) {
        case GenderLabel::Male: return "male";
        case GenderLabel::Female: return "female";
        case GenderLabel::MostlyMale: return "mostly_male";
        case GenderLabel::MostlyFemale: return "mostly_female";
        case GenderLabel::Unknown: return "unknown";
    }
    return "?";
}

std::optional<BackendId> backend_from_string(std::string_view name) {
    std::string lower;
    lower.reserve(name.size());
    for (char c : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (BackendId id : kAllBackends) {
        std::string canonical(to_string(id));
        for (char& c : canonical) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (lower == canonical) return id;
    }
    return std::nullopt;
}

Prediction make_prediction(double score, BackendId source) {
    if (!(score >= -1.0 && score <= 1.0))
        throw ContractViolation("prediction score out of [-1,1]: " + util::double_to_string(score));
    GenderLabel label = score > 0.0   ? GenderLabel::Male
                        : score < 0.0 ? GenderLabel::Female
                                      : GenderLabel::Unknown;
    return Prediction{label, score, source};
}

Prediction prediction_from_probability(double p_male, BackendId source) {
    if (!(p_male >= 0.0 && p_male <= 1.0))
        throw ContractViolation("p_male out of [0,1]: " + util::double_to_string(p_male));
    return make_prediction(2.0 * p_male - 1.0, source);
}

Prediction abstain(BackendId source) {
    return Prediction{GenderLabel::Unknown, 0.0, source};
}

PersonRecord make_person_record(std::string full_name, std::optional<std::string> country,
                                GenderLabel true_gender) {
    bool has_content = false;
    for (unsigned char c : full_name) {
        if (!std::isspace(c)) {
            has_content = true;
            break;
        }
    }
    if (!has_content) throw ContractViolation("full_name must contain a non-whitespace character");
    if (true_gender != GenderLabel::Male && true_gender != GenderLabel::Female)
        throw ContractViolation("true_gender must be Male or Female");
    if (country) {
        if (country->size() != 2 || !std::isalpha(static_cast<unsigned char>((*country)[0])) ||
            !std::isalpha(static_cast<unsigned char>((*country)[1])))
            throw ContractViolation("country must be a two-letter code: " + *country);
        for (char& c : *country) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return PersonRecord{std::move(full_name), std::move(country), true_gender};
}

}  // namespace namegender
