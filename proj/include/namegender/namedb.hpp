#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "namegender/core.hpp"
#include "namegender/normalize.hpp"

namespace namegender {

// Per-name birth/census counts. male_count + female_count >= 1 for any
// stored record.
struct CountRecord {
    std::string name_key;
    long male_count = 0;
    long female_count = 0;

    bool operator==(const CountRecord&) const = default;
};

// Raw gender codes of the dictionary file format.
enum class DictCode {
    Male,          // M
    FirstMale,     // 1M  (male when used as the first part of a name)
    MostlyMale,    // ?M
    Female,        // F
    FirstFemale,   // 1F
    MostlyFemale,  // ?F
    Unisex,        // ?
};

std::string_view to_string(DictCode code);

// One dictionary line: a gender code plus per-country frequency ranks 1-13.
// Countries absent from the map have frequency 0.
struct DictEntry {
    DictCode gender_code = DictCode::Unisex;
    std::string name_key;
    std::map<std::string, int> country_freq;  // canonical column code -> rank

    // Signed score of the raw code: M/1M -> +1, ?M -> +0.5, ? -> 0,
    // ?F -> -0.5, F/1F -> -1.
    double score() const;
    // Five-way raw label (the only place MostlyMale/MostlyFemale appear).
    GenderLabel raw_label() const;
    long global_frequency() const;

    bool operator==(const DictEntry&) const = default;
};

// One parsed offline database. Exactly one of the two indexes is populated,
// matching `backend`. Built once, then immutable; concurrent lookups are safe.
struct NameDatabase {
    BackendId backend = BackendId::SSA;
    std::unordered_map<std::string, CountRecord> count_index;         // SSA / Census
    std::unordered_map<std::string, std::vector<DictEntry>> dict_index;  // Dict
};

// Directory of yobYYYY.txt files, each line `Name,Sex,Count` with Sex in
// {M,F}. Counts are summed across all years per (name, sex). Throws
// ParseError on malformed lines and EmptyDatabaseError when no yob file (or
// no record) is found.
NameDatabase parse_ssa_dir(const std::string& path);

// Single CSV with exact header `name,male_count,female_count`; duplicate
// names are summed. Throws ParseError / EmptyDatabaseError.
NameDatabase parse_census_csv(const std::string& path);

// Fixed-width dictionary file (nam_dict-compatible, UTF-8). Column positions
// are Unicode code points, 1-based:
//   1-2   gender code, left-justified: M, 1M, ?M, F, 1F, ?F, ? or =
//   3     space
//   4-29  name; internal spaces and `+` mark compound names and both are
//         stored as `-`; for `=` lines this field holds `alias target`
//   30    space
//   31-85 one frequency character per country (see kDictCountryColumns):
//         hex digit 1-9, A-D (rank 1-13) or space (absent)
// Lines starting with `#` and blank lines are ignored. `=` lines fold the
// alias key onto the target name's entries once the whole file is read; an
// alias whose target never appears is a no-op.
NameDatabase parse_dict_file(const std::string& path);

// Argmax lookup over birth counts: p_male = m/(m+f) mapped to the signed
// score. Tries key.primary then variants in order; absent everywhere ->
// abstain. Requires db.backend in {SSA, Census}.
Prediction lookup_counts(const NameDatabase& db, const NameKey& key);

// Dictionary lookup with country disambiguation. With a country: the entry
// with the highest frequency in that country wins (ties -> abstain); without
// one, or when no entry has a nonzero frequency there, the entry with the
// highest global frequency sum wins (ties -> abstain). Requires
// db.backend == Dict. Raw codes are collapsed: the returned Prediction is
// Male/Female/Unknown only, with |score| = 0.5 for the ?M/?F codes.
Prediction lookup_dict(const NameDatabase& db, const NameKey& key,
                       const std::optional<std::string>& country);

// The dictionary file's country columns in file order: column label plus the
// query codes that resolve to it. Labels are ISO 3166-1 alpha-2 where one
// exists (FY = East Frisia, AP = Arabia/Persia, XX = other are synthetic).
struct DictCountryColumn {
    const char* code;
    std::vector<const char*> aliases;
};
const std::vector<DictCountryColumn>& dict_country_columns();

// Resolves an ISO code (or column label) to its column index, if any.
std::optional<int> dict_country_column_index(const std::string& country_code);

}  // namespace namegender
