#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "serlab/dataio/labels.hpp"
#include "serlab/numerics/tensor.hpp"

namespace serlab::dataio {

struct UtteranceRecord {
  std::string id;
  Split split = Split::kTrain;
  numerics::Tensor speech;  // T_s x D_s, empty when not supplied
  numerics::Tensor text;    // T_t x D_t, empty when not supplied
  std::optional<Emotion> emotion;
  std::optional<AttributeVector> attributes;
};

struct Dataset {
  std::uint32_t speech_dim = 0;  // 0 when no speech features were loaded
  std::uint32_t text_dim = 0;
  std::vector<UtteranceRecord> records;

  std::vector<const UtteranceRecord*> split(Split s) const;
};

inline constexpr const char* kSpeechFile = "speech.femb";
inline constexpr const char* kTextFile = "text.femb";
inline constexpr const char* kLabelsFile = "labels.csv";

// Record order follows the labels file. Every embedding id must have a
// label row; label rows without features keep an empty tensor.
Dataset load_dataset(const std::filesystem::path& labels, const std::optional<std::filesystem::path>& speech,
                     const std::optional<std::filesystem::path>& text);
// Loads labels.csv plus whichever of speech.femb / text.femb exist in `dir`.
Dataset load_dataset_dir(const std::filesystem::path& dir);
// Writes the three files into `dir`; returns their paths.
std::vector<std::filesystem::path> save_dataset(const std::filesystem::path& dir, const Dataset& ds);

}  // namespace serlab::dataio
