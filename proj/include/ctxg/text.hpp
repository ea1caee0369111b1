#ifndef CTXG_TEXT_HPP
#define CTXG_TEXT_HPP

#include <string>
#include <string_view>
#include <vector>

namespace ctxg::text {

// True for `[A-Za-z][A-Za-z0-9_]*`.
bool is_identifier(std::string_view s);

// True for the bare-token shape used in triple files:
// `[A-Za-z_][A-Za-z0-9_:]*` (covers identifiers plus "rdf:type").
bool is_bare_token(std::string_view s);

std::string trim(std::string_view s);

// Trims and collapses internal whitespace runs to single spaces.
std::string normalize_whitespace(std::string_view s);

// Lowercases and splits into tokens: maximal runs of [a-z0-9_] plus every
// other non-space character as a single-character token.
std::vector<std::string> tokenize(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string to_lower(std::string_view s);

// Round-trip-exact decimal rendering of a double (%.17g).
std::string format_double(double v);

// Parses a double/integer, throwing ctxg::ConfigError on garbage.
double parse_double(std::string_view s, std::string_view what);
long long parse_int(std::string_view s, std::string_view what);

}  // namespace ctxg::text

#endif  // CTXG_TEXT_HPP
