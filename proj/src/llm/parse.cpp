#include "serlab/llm/parse.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <regex>

namespace serlab::llm {

namespace {

bool is_letter(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

bool is_trim(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isspace(u) || std::ispunct(u);
}

}  // namespace

ParseResult<metrics::Emotion> parse_categorical_response(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && is_trim(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_trim(s.back())) s.remove_suffix(1);
  std::size_t end = 0;
  while (end < s.size() && is_letter(s[end])) ++end;
  if (end == 0) return ParseFailure{std::string(text), "no leading word"};
  if (auto e = metrics::parse_emotion_name(s.substr(0, end))) return *e;
  return ParseFailure{std::string(text), "'" + std::string(s.substr(0, end)) + "' is not an allowed emotion"};
}

ParseResult<ParsedAttributes> parse_attribute_response(std::string_view text) {
  static const std::regex kTriple(
      R"(\[\s*([-+]?(?:\d+\.?\d*|\.\d+))\s*,\s*([-+]?(?:\d+\.?\d*|\.\d+))\s*,\s*([-+]?(?:\d+\.?\d*|\.\d+))\s*\])");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(text.begin(), text.end(), m, kTriple)) {
    return ParseFailure{std::string(text), "no bracketed numeric triple"};
  }
  double v[3];
  for (int i = 0; i < 3; ++i) {
    std::string_view num(&*m[i + 1].first, static_cast<std::size_t>(m[i + 1].length()));
    if (!num.empty() && num.front() == '+') num.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v[i]);
    if (ec != std::errc() || ptr != num.data() + num.size() || !std::isfinite(v[i])) {
      return ParseFailure{std::string(text), "unreadable number '" + std::string(num) + "'"};
    }
  }
  ParsedAttributes out;
  const metrics::AttributeVector raw{v[0], v[1], v[2]};
  out.value = raw.clamped();
  out.clamped = !(out.value == raw);
  return out;
}

}  // namespace serlab::llm
