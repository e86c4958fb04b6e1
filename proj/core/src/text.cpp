#include "sqlgen/text.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace sqlgen {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

std::string normalize_text(std::string_view s) { return to_lower(collapse_whitespace(s)); }

std::string format_number(double value) {
    if (value == 0.0) return "0";  // also folds -0
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) {
        std::snprintf(buf, sizeof(buf), "%.17g", value);
        return buf;
    }
    return std::string(buf, end);
}

std::optional<double> parse_number(std::string_view s) {
    if (s.empty()) return std::nullopt;
    // from_chars rejects a leading '+', which is fine: rendered numbers never carry one.
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    // from_chars accepts "inf"/"nan" spellings; those are not SQL numbers.
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

std::string_view utf8_prefix(std::string_view s, std::size_t max_bytes) {
    if (s.size() <= max_bytes) return s;
    std::size_t cut = max_bytes;
    while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
    return s.substr(0, cut);
}

std::vector<std::string_view> split(std::string_view s, std::string_view delimiter) {
    std::vector<std::string_view> parts;
    if (delimiter.empty()) {
        parts.push_back(s);
        return parts;
    }
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(delimiter, start);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + delimiter.size();
    }
}

double round_significant(double value, int digits) {
    if (!std::isfinite(value) || value == 0.0) return value;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
    return std::strtod(buf, nullptr);
}

}  // namespace sqlgen
