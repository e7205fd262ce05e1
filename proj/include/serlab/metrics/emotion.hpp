#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace serlab::metrics {

// Index order matches the single-letter codes A, C, D, F, H, N, S, U.
enum class Emotion : std::uint8_t { kAnger, kContempt, kDisgust, kFear, kHappiness, kNeutral, kSadness, kSurprise };

inline constexpr std::size_t kNumEmotions = 8;
inline constexpr std::array<Emotion, kNumEmotions> kAllEmotions{
    Emotion::kAnger,     Emotion::kContempt, Emotion::kDisgust, Emotion::kFear,
    Emotion::kHappiness, Emotion::kNeutral,  Emotion::kSadness, Emotion::kSurprise};

inline std::size_t index_of(Emotion e) { return static_cast<std::size_t>(e); }
Emotion emotion_from_index(std::size_t index);

char emotion_code(Emotion e);
// "Anger", "Contempt", ... as listed to the LLM.
std::string_view emotion_name(Emotion e);

std::optional<Emotion> parse_emotion_code(std::string_view code);
// Case-insensitive match against the full emotion names.
std::optional<Emotion> parse_emotion_name(std::string_view name);

inline constexpr double kAttributeMin = 1.0;
inline constexpr double kAttributeMax = 7.0;

struct AttributeVector {
  double arousal = 0.0;
  double valence = 0.0;
  double dominance = 0.0;

  bool in_range() const;
  AttributeVector clamped() const;
  bool operator==(const AttributeVector&) const = default;
};

}  // namespace serlab::metrics
