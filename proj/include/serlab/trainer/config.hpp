#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "serlab/model/config.hpp"

namespace serlab::trainer {

using model::Activation;
using model::FusionKind;
using model::Modality;
using model::Task;

enum class LossKind { kCrossEntropy, kWeightedCrossEntropy, kFocal, kCcc, kMse };
enum class SamplerKind { kShuffled, kBalanced };

LossKind parse_loss(std::string_view name);
SamplerKind parse_sampler(std::string_view name);
std::string to_string(LossKind loss);
std::string to_string(SamplerKind sampler);
bool is_categorical_loss(LossKind loss);

inline constexpr std::size_t kDefaultBatchSize = 32;
inline constexpr double kStage1LearningRate = 1e-5;
inline constexpr std::size_t kStage1Epochs = 20;
inline constexpr double kStage2LearningRate = 5e-6;
inline constexpr std::size_t kStage2Epochs = 5;

struct TrainConfig {
  int stage = 1;
  Modality modality = Modality::kSpeech;  // stage 1
  Task task = Task::kCategorical;
  // Unset picks focal for categorical and ccc for attributes.
  std::optional<LossKind> loss;
  SamplerKind sampler = SamplerKind::kShuffled;
  FusionKind fusion = FusionKind::kConcat;  // stage 2
  Activation activation = Activation::kMish;
  std::size_t batch_size = kDefaultBatchSize;
  double learning_rate = kStage1LearningRate;
  std::size_t epochs = kStage1Epochs;
  double focal_gamma = 2.0;
  std::size_t hidden = 16;
  std::size_t attention_dim = 8;
  std::size_t embed = 16;
  std::size_t xattn_dim = 16;
  std::uint64_t seed = 0;

  static TrainConfig defaults(int stage);

  LossKind effective_loss() const;
  void validate() const;
  nlohmann::json to_json() const;
};

// Architecture recorded in checkpoint metadata so that a checkpoint can be
// rebuilt without the config that produced it.
struct ModelSpec {
  int stage = 1;
  Task task = Task::kCategorical;
  std::optional<model::EncoderCfg> speech;
  std::optional<model::EncoderCfg> text;
  model::FusionHeadCfg head;
  std::optional<model::CrossAttentionCfg> xattn;

  nlohmann::json to_json() const;
  static ModelSpec from_json(const nlohmann::json& j);
};

}  // namespace serlab::trainer
