#include "namegender/dataset.hpp"

#include <optional>

#include "namegender/errors.hpp"
#include "namegender/util.hpp"

namespace namegender {

std::vector<PersonRecord> load_dataset(const std::string& path,
                                       const std::string& country_column) {
    std::string body = util::read_file(path);
    auto rows = util::parse_csv(body, path);
    if (rows.empty()) throw ParseError(path, 1, 1, "missing dataset header");

    const auto& header = rows[0];
    std::optional<size_t> name_col, country_col, gender_col;
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "full_name") name_col = i;
        if (header[i] == country_column) country_col = i;
        if (header[i] == "gender") gender_col = i;
    }
    if (!name_col || !gender_col)
        throw ParseError(path, 1, 1, "dataset header needs `full_name` and `gender` columns");

    std::vector<PersonRecord> records;
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        long line_no = static_cast<long>(i) + 1;
        if (row.size() < header.size())
            throw ParseError(path, line_no, 1,
                             "row has " + std::to_string(row.size()) + " fields, header has " +
                                 std::to_string(header.size()));
        const std::string& gender = row[*gender_col];
        GenderLabel label;
        if (gender == "M")
            label = GenderLabel::Male;
        else if (gender == "F")
            label = GenderLabel::Female;
        else
            throw ParseError(path, line_no, 1, "gender must be M or F, got `" + gender + "`");
        std::optional<std::string> country;
        if (country_col && !row[*country_col].empty()) country = row[*country_col];
        try {
            records.push_back(make_person_record(row[*name_col], std::move(country), label));
        } catch (const ContractViolation& e) {
            throw ParseError(path, line_no, 1, e.what());
        }
    }
    if (records.empty()) throw EmptyDatasetError("no data rows in " + path);
    return records;
}

}  // namespace namegender
