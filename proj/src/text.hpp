#pragma once

// Line-oriented tokenizer shared by the text formats.

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "braidcell/error.hpp"

namespace braidcell::detail {

struct Token {
  std::string_view text;
  std::size_t column = 1;
};

struct Line {
  std::size_t number = 0;
  std::vector<Token> tokens;

  const Token& at(std::size_t i) const {
    if (i >= tokens.size()) {
      std::size_t col = tokens.empty() ? 1 : tokens.back().column +
                                                 tokens.back().text.size();
      throw ParseError(number, col, "unexpected end of line");
    }
    return tokens[i];
  }
  [[noreturn]] void fail(std::size_t i, const std::string& what) const {
    throw ParseError(number, i < tokens.size() ? tokens[i].column : 1, what);
  }
  void expect_size(std::size_t n) const {
    if (tokens.size() > n) fail(n, "unexpected trailing token");
    if (tokens.size() < n) at(n);
  }
};

/// Splits text into non-empty lines of whitespace-separated tokens. '#'
/// starts a comment.
inline std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++number;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) {
      raw = raw.substr(0, hash);
    }
    Line line;
    line.number = number;
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() &&
             (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '\r')) {
        ++i;
      }
      std::size_t start = i;
      while (i < raw.size() && raw[i] != ' ' && raw[i] != '\t' &&
             raw[i] != '\r') {
        ++i;
      }
      if (i > start) line.tokens.push_back({raw.substr(start, i - start), start + 1});
    }
    if (!line.tokens.empty()) out.push_back(std::move(line));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return out;
}

/// Parses a decimal integer with an optional leading '+' or '-'.
inline bool parse_int(std::string_view s, std::int64_t& value) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

inline std::int64_t int_at(const Line& line, std::size_t i) {
  std::int64_t v = 0;
  if (!parse_int(line.at(i).text, v)) line.fail(i, "expected an integer");
  return v;
}

inline int id_at(const Line& line, std::size_t i) {
  const Token& t = line.at(i);
  std::int64_t v = 0;
  if (t.text.empty() || t.text.front() == '+' || t.text.front() == '-' ||
      !parse_int(t.text, v) || v > INT32_MAX) {
    line.fail(i, "expected a nonnegative id");
  }
  return static_cast<int>(v);
}

inline void expect_keyword(const Line& line, std::size_t i, std::string_view kw) {
  if (line.at(i).text != kw) {
    line.fail(i, "expected '" + std::string(kw) + "'");
  }
}

}  // namespace braidcell::detail
