#pragma once

#include <string>
#include <vector>

#include "namegender/core.hpp"

namespace namegender {

// Loads a labeled dataset: UTF-8 CSV with a header naming at least
// `full_name` and `gender` columns (gender M or F); the country column
// (default name "country") is optional and may be empty per row. Extra
// columns are ignored. Throws ParseError with the offending row number.
std::vector<PersonRecord> load_dataset(const std::string& path,
                                       const std::string& country_column = "country");

}  // namespace namegender
