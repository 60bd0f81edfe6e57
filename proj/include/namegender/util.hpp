#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace namegender::util {

// FNV-1a 64-bit. Used for fixture directory names and face-detect cache keys,
// so the exact constants are part of the on-disk contract.
std::uint64_t fnv1a64(std::string_view data);

// fnv1a64 rendered as 16 lowercase hex characters.
std::string fnv1a64_hex(std::string_view data);

// Standard base64 with padding. decode returns nullopt on any invalid input.
std::string base64_encode(std::string_view data);
std::optional<std::string> base64_decode(std::string_view text);

// Shortest round-trip decimal form of a double ("0.96", "-0.9607843137254902").
// All serialized reports go through this so reruns are byte-identical.
std::string double_to_string(double value);

// Fixed-point with `decimals` digits, for the human-readable tables.
std::string double_fixed(double value, int decimals);

// RFC 3986 percent-encoding of a query component.
std::string percent_encode(std::string_view text);

// "2026-08-09T12:34:56Z"
std::string iso8601_utc_now();

std::string_view trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);

// One CSV record per inner vector; handles quoted fields, "" escapes and CRLF.
// Parse failures report the offending 1-based line.
std::vector<std::vector<std::string>> parse_csv(std::string_view body, const std::string& filename);

// Quotes a field iff it contains a comma, quote or newline.
std::string csv_escape(std::string_view field);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace namegender::util
