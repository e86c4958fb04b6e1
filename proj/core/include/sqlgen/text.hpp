#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sqlgen {

/// ASCII lowercasing. Bytes >= 0x80 (UTF-8 continuation and lead bytes) pass
/// through untouched, so multi-byte text is never corrupted.
std::string to_lower(std::string_view s);

std::string_view trim(std::string_view s);

/// Runs of ASCII whitespace become one space; leading/trailing runs are dropped.
std::string collapse_whitespace(std::string_view s);

/// lowercase + trim + collapse whitespace.
std::string normalize_text(std::string_view s);

/// Shortest decimal text that round-trips to the same double ("24", "2.5", "1e+20").
std::string format_number(double value);

/// Parses the whole string as a finite decimal number; surrounding text fails.
std::optional<double> parse_number(std::string_view s);

/// Prefix of at most max_bytes bytes that does not split a UTF-8 sequence.
std::string_view utf8_prefix(std::string_view s, std::size_t max_bytes);

std::vector<std::string_view> split(std::string_view s, std::string_view delimiter);

/// Rounds to `digits` significant decimal digits (used for text emissions).
double round_significant(double value, int digits = 12);

}  // namespace sqlgen
