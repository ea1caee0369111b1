#include "ctxg/text.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "ctxg/errors.hpp"

namespace ctxg::text {

namespace {

bool is_word_char(unsigned char c) {
  return std::isalnum(c) != 0 || c == '_';
}

}  // namespace

bool is_identifier(std::string_view s) {
  if (s.empty() || std::isalpha(static_cast<unsigned char>(s[0])) == 0) {
    return false;
  }
  for (unsigned char c : s) {
    if (!is_word_char(c)) return false;
  }
  return true;
}

bool is_bare_token(std::string_view s) {
  if (s.empty()) return false;
  unsigned char first = static_cast<unsigned char>(s[0]);
  if (std::isalpha(first) == 0 && first != '_') return false;
  for (unsigned char c : s) {
    if (!is_word_char(c) && c != ':') return false;
  }
  return true;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b])) != 0) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])) != 0) --e;
  return std::string(s.substr(b, e - b));
}

std::string normalize_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_space = true;  // leading whitespace dropped
  for (unsigned char c : s) {
    if (std::isspace(c) != 0) {
      in_space = true;
    } else {
      if (in_space && !out.empty()) out.push_back(' ');
      out.push_back(static_cast<char>(c));
      in_space = false;
    }
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char raw : s) {
    unsigned char c = static_cast<unsigned char>(std::tolower(raw));
    if (is_word_char(c)) {
      current.push_back(static_cast<char>(c));
    } else {
      if (!current.empty()) {
        tokens.push_back(current);
        current.clear();
      }
      if (std::isspace(c) == 0) {
        tokens.push_back(std::string(1, static_cast<char>(c)));
      }
    }
  }
  if (!current.empty()) tokens.push_back(current);
  return tokens;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(s.substr(start));
      break;
    }
    parts.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

double parse_double(std::string_view s, std::string_view what) {
  std::string t = trim(s);
  double value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("invalid number for " + std::string(what) + ": '" +
                      t + "'");
  }
  return value;
}

long long parse_int(std::string_view s, std::string_view what) {
  std::string t = trim(s);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("invalid integer for " + std::string(what) + ": '" +
                      t + "'");
  }
  return value;
}

}  // namespace ctxg::text
