#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "serlab/metrics/emotion.hpp"

namespace serlab::dataio {

using metrics::AttributeVector;
using metrics::Emotion;

enum class Split { kTrain, kDev, kTest1 };

Split parse_split(std::string_view name);
std::string to_string(Split split);

inline constexpr std::string_view kLabelsHeader = "id,split,emotion,arousal,valence,dominance";
inline constexpr std::string_view kPredictionsHeader = "id,emotion,arousal,valence,dominance";

struct LabelRow {
  std::string id;
  Split split = Split::kTrain;
  std::optional<Emotion> emotion;
  std::optional<AttributeVector> attributes;
};

// Errors name the source and the 1-based line number.
std::vector<LabelRow> parse_labels(std::string_view text, const std::string& source = "labels");
std::string format_labels(const std::vector<LabelRow>& rows);
std::vector<LabelRow> read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const std::vector<LabelRow>& rows);

struct Prediction {
  std::string id;
  std::optional<Emotion> emotion;
  std::optional<AttributeVector> attributes;

  bool operator==(const Prediction&) const = default;
};

struct PredictionSet {
  std::vector<Prediction> items;

  bool operator==(const PredictionSet&) const = default;
};

// Predicted attributes may lie outside [1, 7] (unclamped model output).
PredictionSet parse_predictions(std::string_view text, const std::string& source = "predictions");
std::string format_predictions(const PredictionSet& set);
PredictionSet read_predictions(const std::filesystem::path& path);
void write_predictions(const std::filesystem::path& path, const PredictionSet& set);

// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace serlab::dataio
