#include "namegender/normalize.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>

#include "namegender/errors.hpp"

namespace namegender {

namespace {

const icu::Normalizer2& nfkd() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* instance = icu::Normalizer2::getNFKDInstance(status);
    if (U_FAILURE(status) || instance == nullptr)
        throw Error("ICU NFKD normalizer unavailable");
    return *instance;
}

bool is_space_cp(UChar32 cp) { return u_isUWhiteSpace(cp); }

// Lowercases code point by code point (root-locale simple mapping).
icu::UnicodeString to_lower(const icu::UnicodeString& text) {
    icu::UnicodeString out;
    for (int32_t i = 0; i < text.length();) {
        UChar32 cp = text.char32At(i);
        out.append(u_tolower(cp));
        i += U16_LENGTH(cp);
    }
    return out;
}

// NFKD then drop combining marks (general category Mn).
icu::UnicodeString strip_marks(const icu::UnicodeString& text) {
    UErrorCode status = U_ZERO_ERROR;
    icu::UnicodeString decomposed = nfkd().normalize(text, status);
    if (U_FAILURE(status)) throw Error("ICU normalization failed");
    icu::UnicodeString out;
    for (int32_t i = 0; i < decomposed.length();) {
        UChar32 cp = decomposed.char32At(i);
        if (u_charType(cp) != U_NON_SPACING_MARK) out.append(cp);
        i += U16_LENGTH(cp);
    }
    return out;
}

std::string to_utf8(const icu::UnicodeString& text) {
    std::string out;
    text.toUTF8String(out);
    return out;
}

// First run of non-whitespace code points.
icu::UnicodeString first_token(const icu::UnicodeString& text) {
    int32_t i = 0;
    while (i < text.length()) {
        UChar32 cp = text.char32At(i);
        if (!is_space_cp(cp)) break;
        i += U16_LENGTH(cp);
    }
    int32_t start = i;
    while (i < text.length()) {
        UChar32 cp = text.char32At(i);
        if (is_space_cp(cp)) break;
        i += U16_LENGTH(cp);
    }
    return text.tempSubStringBetween(start, i);
}

}  // namespace

std::string fold_key(const std::string& token) {
    icu::UnicodeString u = icu::UnicodeString::fromUTF8(token);
    return to_utf8(to_lower(strip_marks(u)));
}

NameKey extract_first_name(const std::string& full_name) {
    icu::UnicodeString u = icu::UnicodeString::fromUTF8(full_name);
    icu::UnicodeString token = first_token(u);
    if (token.isEmpty()) throw EmptyNameError("full name is empty or all whitespace");

    std::string primary = to_utf8(to_lower(strip_marks(token)));
    std::string unfolded = to_utf8(to_lower(token));
    if (primary.empty())
        throw EmptyNameError("first name normalizes to an empty key: " + full_name);

    NameKey key;
    key.primary = primary;
    auto add_variant = [&key](const std::string& v) {
        if (v.empty() || v == key.primary) return;
        if (std::find(key.variants.begin(), key.variants.end(), v) == key.variants.end())
            key.variants.push_back(v);
    };
    // Hyphen-split parts of the folded form, then the unfolded form.
    if (primary.find('-') != std::string::npos) {
        size_t start = 0;
        while (start <= primary.size()) {
            size_t pos = primary.find('-', start);
            if (pos == std::string::npos) pos = primary.size();
            add_variant(primary.substr(start, pos - start));
            start = pos + 1;
        }
    }
    add_variant(unfolded);
    return key;
}

std::string image_query(const std::string& full_name) {
    icu::UnicodeString u = icu::UnicodeString::fromUTF8(full_name);
    icu::UnicodeString out;
    bool pending_space = false;
    bool seen_content = false;
    for (int32_t i = 0; i < u.length();) {
        UChar32 cp = u.char32At(i);
        i += U16_LENGTH(cp);
        if (is_space_cp(cp)) {
            pending_space = seen_content;
            continue;
        }
        if (pending_space) {
            out.append(static_cast<UChar32>(' '));
            pending_space = false;
        }
        out.append(cp);
        seen_content = true;
    }
    if (!seen_content) throw EmptyNameError("image query input is empty or all whitespace");
    return to_utf8(out);
}

}  // namespace namegender
