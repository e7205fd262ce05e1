#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "serlab/metrics/emotion.hpp"

namespace serlab::llm {

struct ParseFailure {
  std::string raw;
  std::string reason;
};

template <typename T>
using ParseResult = std::variant<T, ParseFailure>;

struct ParsedAttributes {
  metrics::AttributeVector value;
  bool clamped = false;
};

// Strips surrounding whitespace and punctuation, then matches the first run
// of letters case-insensitively against the eight emotion names.
ParseResult<metrics::Emotion> parse_categorical_response(std::string_view text);

// First "[a, v, d]" triple of decimal numbers, read in arousal, valence,
// dominance order and clamped to [1, 7].
ParseResult<ParsedAttributes> parse_attribute_response(std::string_view text);

}  // namespace serlab::llm
