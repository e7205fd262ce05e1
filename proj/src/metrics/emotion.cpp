#include "serlab/metrics/emotion.hpp"

#include <algorithm>
#include <cctype>

#include "serlab/common/error.hpp"

namespace serlab::metrics {
namespace {

constexpr std::array<char, kNumEmotions> kCodes{'A', 'C', 'D', 'F', 'H', 'N', 'S', 'U'};
constexpr std::array<std::string_view, kNumEmotions> kNames{"Anger",     "Contempt", "Disgust", "Fear",
                                                            "Happiness", "Neutral",  "Sadness", "Surprise"};

}  // namespace

Emotion emotion_from_index(std::size_t index) {
  if (index >= kNumEmotions) throw ValidationError("emotion index " + std::to_string(index) + " out of range");
  return static_cast<Emotion>(index);
}

char emotion_code(Emotion e) { return kCodes.at(index_of(e)); }
std::string_view emotion_name(Emotion e) { return kNames.at(index_of(e)); }

std::optional<Emotion> parse_emotion_code(std::string_view code) {
  if (code.size() != 1) return std::nullopt;
  for (std::size_t i = 0; i < kNumEmotions; ++i) {
    if (kCodes[i] == code[0]) return static_cast<Emotion>(i);
  }
  return std::nullopt;
}

std::optional<Emotion> parse_emotion_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumEmotions; ++i) {
    const auto& n = kNames[i];
    if (n.size() == name.size() &&
        std::equal(n.begin(), n.end(), name.begin(), [](char a, char b) {
          return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
        })) {
      return static_cast<Emotion>(i);
    }
  }
  return std::nullopt;
}

bool AttributeVector::in_range() const {
  auto ok = [](double v) { return v >= kAttributeMin && v <= kAttributeMax; };
  return ok(arousal) && ok(valence) && ok(dominance);
}

AttributeVector AttributeVector::clamped() const {
  auto c = [](double v) { return std::clamp(v, kAttributeMin, kAttributeMax); };
  return {c(arousal), c(valence), c(dominance)};
}

}  // namespace serlab::metrics
