#include "namegender/namedb.hpp"

#include <unicode/unistr.h>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <regex>

#include "namegender/errors.hpp"
#include "namegender/util.hpp"

namespace fs = std::filesystem;

namespace namegender {

std::string_view to_string(DictCode code) {
    switch (code) {
        case DictCode::Male: return "M";
        case DictCode::FirstMale: return "1M";
        case DictCode::MostlyMale: return "?M";
        case DictCode::Female: return "F";
        case DictCode::FirstFemale: return "1F";
        case DictCode::MostlyFemale: return "?F";
        case DictCode::Unisex: return "?";
    }
    return "?";
}

double DictEntry::score() const {
    switch (gender_code) {
        case DictCode::Male:
        case DictCode::FirstMale: return 1.0;
        case DictCode::MostlyMale: return 0.5;
        case DictCode::Unisex: return 0.0;
        case DictCode::MostlyFemale: return -0.5;
        case DictCode::Female:
        case DictCode::FirstFemale: return -1.0;
    }
    return 0.0;
}

GenderLabel DictEntry::raw_label() const {
    switch (gender_code) {
        case DictCode::Male:
        case DictCode::FirstMale: return GenderLabel::Male;
        case DictCode::MostlyMale: return GenderLabel::MostlyMale;
        case DictCode::Female:
        case DictCode::FirstFemale: return GenderLabel::Female;
        case DictCode::MostlyFemale: return GenderLabel::MostlyFemale;
        case DictCode::Unisex: return GenderLabel::Unknown;
    }
    return GenderLabel::Unknown;
}

long DictEntry::global_frequency() const {
    long sum = 0;
    for (const auto& [code, rank] : country_freq) sum += rank;
    return sum;
}

namespace {

bool parse_long(std::string_view text, long& out) {
    if (text.empty()) return false;
    long value = 0;
    for (char c : text) {
        if (c < '0' || c > '9') return false;
        value = value * 10 + (c - '0');
        if (value < 0) return false;  // overflow
    }
    out = value;
    return true;
}

// Folds a name field into a lookup key. Whitespace inside compound names is
// treated like `+`: both become hyphens.
std::string fold_name_field(std::string name) {
    for (char& c : name) {
        if (c == '+' || c == ' ') c = '-';
    }
    return fold_key(name);
}

void add_count(NameDatabase& db, const std::string& key, char sex, long count) {
    CountRecord& rec = db.count_index[key];
    rec.name_key = key;
    if (sex == 'M')
        rec.male_count += count;
    else
        rec.female_count += count;
}

void parse_ssa_file(NameDatabase& db, const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open file: " + file.string());
    std::string line;
    long line_no = 0;
    const std::string fname = file.string();
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = util::split(line, ',');
        if (fields.size() != 3)
            throw ParseError(fname, line_no, 1, "expected `Name,Sex,Count`, got " +
                                                    std::to_string(fields.size()) + " field(s)");
        const std::string& name = fields[0];
        if (name.empty() || name.find_first_of(" \t") != std::string::npos)
            throw ParseError(fname, line_no, 1, "bad name field");
        if (fields[1] != "M" && fields[1] != "F")
            throw ParseError(fname, line_no, static_cast<long>(name.size()) + 2,
                             "sex must be M or F, got `" + fields[1] + "`");
        long count = 0;
        if (!parse_long(fields[2], count))
            throw ParseError(fname, line_no,
                             static_cast<long>(name.size() + fields[1].size()) + 3,
                             "count must be a non-negative integer, got `" + fields[2] + "`");
        if (count == 0) continue;  // contributes nothing; keeps m+f >= 1
        add_count(db, fold_key(name), fields[1][0], count);
    }
}

}  // namespace

NameDatabase parse_ssa_dir(const std::string& path) {
    if (!fs::is_directory(path)) throw Error("not a directory: " + path);
    static const std::regex yob_pattern(R"(yob\d{4}\.txt)");

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
        if (entry.is_regular_file() &&
            std::regex_match(entry.path().filename().string(), yob_pattern))
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw EmptyDatabaseError("no yobYYYY.txt files in " + path);

    NameDatabase db;
    db.backend = BackendId::SSA;
    for (const auto& file : files) parse_ssa_file(db, file);
    if (db.count_index.empty()) throw EmptyDatabaseError("no name records in " + path);
    return db;
}

NameDatabase parse_census_csv(const std::string& path) {
    std::string body = util::read_file(path);
    auto rows = util::parse_csv(body, path);
    if (rows.empty()) throw ParseError(path, 1, 1, "missing header `name,male_count,female_count`");
    const auto& header = rows[0];
    if (header.size() != 3 || header[0] != "name" || header[1] != "male_count" ||
        header[2] != "female_count")
        throw ParseError(path, 1, 1, "header must be exactly `name,male_count,female_count`");

    NameDatabase db;
    db.backend = BackendId::Census;
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        long line_no = static_cast<long>(i) + 1;
        if (row.size() != 3)
            throw ParseError(path, line_no, 1,
                             "expected 3 fields, got " + std::to_string(row.size()));
        if (row[0].empty()) throw ParseError(path, line_no, 1, "empty name");
        long male = 0;
        long female = 0;
        if (!parse_long(row[1], male))
            throw ParseError(path, line_no, static_cast<long>(row[0].size()) + 2,
                             "male_count must be a non-negative integer, got `" + row[1] + "`");
        if (!parse_long(row[2], female))
            throw ParseError(path, line_no, static_cast<long>(row[0].size() + row[1].size()) + 3,
                             "female_count must be a non-negative integer, got `" + row[2] + "`");
        if (male + female == 0)
            throw ParseError(path, line_no, 1, "record has zero total count");
        std::string key = fold_key(row[0]);
        if (key.empty()) throw ParseError(path, line_no, 1, "name folds to an empty key");
        CountRecord& rec = db.count_index[key];
        rec.name_key = key;
        rec.male_count += male;
        rec.female_count += female;
    }
    if (db.count_index.empty()) throw EmptyDatabaseError("no data rows in " + path);
    return db;
}

const std::vector<DictCountryColumn>& dict_country_columns() {
    // File order of the 55 frequency columns (cols 31-85).
    static const std::vector<DictCountryColumn> columns = {
        {"GB", {}}, {"IE", {}}, {"US", {}}, {"IT", {}}, {"MT", {}}, {"PT", {}},
        {"ES", {}}, {"FR", {}}, {"BE", {}}, {"LU", {}}, {"NL", {}},
        {"FY", {}},  // East Frisia
        {"DE", {}}, {"AT", {}}, {"CH", {}}, {"IS", {}}, {"DK", {}}, {"NO", {}},
        {"SE", {}}, {"FI", {}}, {"EE", {}}, {"LV", {}}, {"LT", {}}, {"PL", {}},
        {"CZ", {}}, {"SK", {}}, {"HU", {}}, {"RO", {}}, {"BG", {}}, {"BA", {}},
        {"HR", {}}, {"XK", {}}, {"MK", {}}, {"ME", {}}, {"RS", {}}, {"SI", {}},
        {"AL", {}}, {"GR", {}}, {"RU", {}}, {"BY", {}}, {"MD", {}}, {"UA", {}},
        {"AM", {}}, {"AZ", {}}, {"GE", {}},
        {"KZ", {"UZ"}},        // Kazakhstan/Uzbekistan
        {"TR", {}},
        {"AP", {"SA", "IR"}},  // Arabia/Persia
        {"IL", {}}, {"CN", {}},
        {"IN", {"LK"}},        // India/Sri Lanka
        {"JP", {}}, {"KR", {}}, {"VN", {}},
        {"XX", {}},            // other countries
    };
    return columns;
}

std::optional<int> dict_country_column_index(const std::string& country_code) {
    static const std::unordered_map<std::string, int> index = [] {
        std::unordered_map<std::string, int> map;
        const auto& columns = dict_country_columns();
        for (size_t i = 0; i < columns.size(); ++i) {
            map.emplace(columns[i].code, static_cast<int>(i));
            for (const char* alias : columns[i].aliases) map.emplace(alias, static_cast<int>(i));
        }
        return map;
    }();
    auto it = index.find(country_code);
    if (it == index.end()) return std::nullopt;
    return it->second;
}

namespace {

constexpr int kNameBegin = 3;    // 0-based: columns 4-29
constexpr int kNameEnd = 29;
constexpr int kFreqBegin = 30;   // 0-based: columns 31-85
constexpr int kFreqCount = 55;

std::optional<DictCode> dict_code_from(const std::string& text) {
    if (text == "M") return DictCode::Male;
    if (text == "1M") return DictCode::FirstMale;
    if (text == "?M") return DictCode::MostlyMale;
    if (text == "F") return DictCode::Female;
    if (text == "1F") return DictCode::FirstFemale;
    if (text == "?F") return DictCode::MostlyFemale;
    if (text == "?") return DictCode::Unisex;
    return std::nullopt;
}

struct DictLine {
    std::u32string chars;  // line as code points

    char32_t at(int idx) const {
        return idx < static_cast<int>(chars.size()) ? chars[static_cast<size_t>(idx)] : U' ';
    }
    std::string slice_utf8(int begin, int end) const {
        icu::UnicodeString out;
        for (int i = begin; i < end && i < static_cast<int>(chars.size()); ++i)
            out.append(static_cast<UChar32>(chars[static_cast<size_t>(i)]));
        std::string utf8;
        out.toUTF8String(utf8);
        return utf8;
    }
};

DictLine decode_line(const std::string& raw, const std::string& fname, long line_no) {
    icu::UnicodeString u = icu::UnicodeString::fromUTF8(raw);
    // fromUTF8 replaces malformed sequences with U+FFFD.
    DictLine line;
    for (int32_t i = 0; i < u.length();) {
        UChar32 cp = u.char32At(i);
        if (cp == 0xFFFD) throw ParseError(fname, line_no, static_cast<long>(line.chars.size()) + 1,
                                           "invalid UTF-8");
        line.chars.push_back(static_cast<char32_t>(cp));
        i += U16_LENGTH(cp);
    }
    return line;
}

std::string rtrim_spaces(std::string text) {
    while (!text.empty() && text.back() == ' ') text.pop_back();
    return text;
}

}  // namespace

NameDatabase parse_dict_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);

    NameDatabase db;
    db.backend = BackendId::Dict;
    std::vector<std::pair<std::string, std::string>> aliases;  // alias key -> target key

    std::string raw;
    long line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty() || raw[0] == '#') continue;
        if (raw.find_first_not_of(' ') == std::string::npos) continue;

        DictLine line = decode_line(raw, path, line_no);
        std::string code_text = rtrim_spaces(line.slice_utf8(0, 2));
        if (line.at(2) != U' ')
            throw ParseError(path, line_no, 3, "column 3 must be a space");

        std::string name_field = rtrim_spaces(line.slice_utf8(kNameBegin, kNameEnd));
        if (name_field.empty()) throw ParseError(path, line_no, kNameBegin + 1, "empty name field");
        if (line.at(kNameEnd) != U' ')
            throw ParseError(path, line_no, kNameEnd + 1, "name field overruns column 29");

        if (code_text == "=") {
            // `alias target`, both possibly compound (`+`); single space between.
            size_t sep = name_field.find(' ');
            if (sep == std::string::npos || name_field.find(' ', sep + 1) != std::string::npos)
                throw ParseError(path, line_no, kNameBegin + 1,
                                 "`=` line needs exactly `alias target` in the name field");
            std::string alias = fold_name_field(name_field.substr(0, sep));
            std::string target = fold_name_field(name_field.substr(sep + 1));
            if (alias.empty() || target.empty())
                throw ParseError(path, line_no, kNameBegin + 1, "empty alias or target");
            aliases.emplace_back(alias, target);
            continue;
        }

        auto code = dict_code_from(code_text);
        if (!code)
            throw ParseError(path, line_no, 1, "unknown gender code `" + code_text + "`");

        DictEntry entry;
        entry.gender_code = *code;
        entry.name_key = fold_name_field(name_field);
        if (entry.name_key.empty())
            throw ParseError(path, line_no, kNameBegin + 1, "name folds to an empty key");

        const auto& columns = dict_country_columns();
        for (int i = 0; i < kFreqCount; ++i) {
            char32_t c = line.at(kFreqBegin + i);
            if (c == U' ') continue;
            int rank;
            if (c >= U'1' && c <= U'9')
                rank = static_cast<int>(c - U'1') + 1;
            else if (c >= U'A' && c <= U'D')
                rank = static_cast<int>(c - U'A') + 10;
            else
                throw ParseError(path, line_no, kFreqBegin + i + 1,
                                 "frequency must be 1-9, A-D or space");
            entry.country_freq[columns[static_cast<size_t>(i)].code] = rank;
        }
        if (static_cast<int>(line.chars.size()) > kFreqBegin + kFreqCount) {
            std::string tail = rtrim_spaces(line.slice_utf8(kFreqBegin + kFreqCount,
                                                            static_cast<int>(line.chars.size())));
            if (!tail.empty())
                throw ParseError(path, line_no, kFreqBegin + kFreqCount + 1,
                                 "unexpected content after column 85");
        }
        db.dict_index[entry.name_key].push_back(std::move(entry));
    }

    // Aliases resolve against the fully parsed file; unknown targets are no-ops.
    for (const auto& [alias, target] : aliases) {
        auto it = db.dict_index.find(target);
        if (it == db.dict_index.end()) continue;
        auto entries = it->second;  // copy: alias may equal an existing key
        auto& slot = db.dict_index[alias];
        slot.insert(slot.end(), entries.begin(), entries.end());
    }

    if (db.dict_index.empty()) throw EmptyDatabaseError("no dictionary entries in " + path);
    return db;
}

namespace {

template <typename Index>
const typename Index::mapped_type* find_first(const Index& index, const NameKey& key) {
    if (auto it = index.find(key.primary); it != index.end()) return &it->second;
    for (const auto& variant : key.variants)
        if (auto it = index.find(variant); it != index.end()) return &it->second;
    return nullptr;
}

}  // namespace

Prediction lookup_counts(const NameDatabase& db, const NameKey& key) {
    if (db.backend != BackendId::SSA && db.backend != BackendId::Census)
        throw ContractViolation("lookup_counts requires an SSA or Census database");
    const CountRecord* rec = find_first(db.count_index, key);
    if (rec == nullptr) return abstain(db.backend);
    double total = static_cast<double>(rec->male_count + rec->female_count);
    return prediction_from_probability(static_cast<double>(rec->male_count) / total, db.backend);
}

Prediction lookup_dict(const NameDatabase& db, const NameKey& key,
                       const std::optional<std::string>& country) {
    if (db.backend != BackendId::Dict)
        throw ContractViolation("lookup_dict requires a Dict database");
    const std::vector<DictEntry>* entries = find_first(db.dict_index, key);
    if (entries == nullptr || entries->empty()) return abstain(BackendId::Dict);

    const DictEntry* winner = nullptr;
    bool tie = false;

    if (country) {
        std::string column_code;
        if (auto idx = dict_country_column_index(*country))
            column_code = dict_country_columns()[static_cast<size_t>(*idx)].code;
        int best = 0;
        for (const DictEntry& entry : *entries) {
            int freq = 0;
            if (!column_code.empty()) {
                auto it = entry.country_freq.find(column_code);
                if (it != entry.country_freq.end()) freq = it->second;
            }
            if (freq == 0) continue;
            if (freq > best) {
                best = freq;
                winner = &entry;
                tie = false;
            } else if (freq == best) {
                tie = true;
            }
        }
        if (winner != nullptr && tie) return abstain(BackendId::Dict);
        // No entry with a nonzero frequency there: fall back to the global rule.
    }

    if (winner == nullptr) {
        long best = -1;
        tie = false;
        for (const DictEntry& entry : *entries) {
            long sum = entry.global_frequency();
            if (sum > best) {
                best = sum;
                winner = &entry;
                tie = false;
            } else if (sum == best) {
                tie = true;
            }
        }
        if (winner == nullptr || tie) return abstain(BackendId::Dict);
    }

    double score = winner->score();
    if (score == 0.0) return abstain(BackendId::Dict);
    return make_prediction(score, BackendId::Dict);
}

}  // namespace namegender
