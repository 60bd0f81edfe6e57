#pragma once

#include <string>
#include <vector>

namespace namegender {

// Lookup keys for one person. `primary` is the first whitespace-delimited
// token of the full name, lowercased, compatibility-normalized (NFKD) and
// stripped of combining marks. `variants` are extra lookup strings tried in
// order after `primary`: hyphen-split parts first, then the unfolded
// (lowercased but not diacritic-stripped) form when it differs.
struct NameKey {
    std::string primary;
    std::vector<std::string> variants;

    bool operator==(const NameKey&) const = default;
};

// Throws EmptyNameError when the input is empty/all-whitespace or the first
// token normalizes to nothing (e.g. combining marks only).
NameKey extract_first_name(const std::string& full_name);

// Whitespace-collapsed, trimmed full name with letter case preserved; the
// query string for image search. Throws EmptyNameError on empty input.
std::string image_query(const std::string& full_name);

// Folds one already-isolated token the same way `extract_first_name` folds
// the first token: lowercase, NFKD, combining marks removed. Database parsers
// use this so stored keys and lookup keys agree.
std::string fold_key(const std::string& token);

}  // namespace namegender
