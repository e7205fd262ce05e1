#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace serlab::model {

enum class Task { kCategorical, kAttributes };
enum class Modality { kSpeech, kText };
enum class Activation { kMish, kRelu };
enum class FusionKind { kConcat, kCrossAttention };

inline constexpr std::size_t kNumEmotions = 8;
inline constexpr std::size_t kNumAttributes = 3;

// 8 logits for the categorical task, 3 outputs (arousal, valence, dominance)
// for the attribute task.
std::size_t output_dim(Task task);

Task parse_task(std::string_view name);
Modality parse_modality(std::string_view name);
Activation parse_activation(std::string_view name);
FusionKind parse_fusion(std::string_view name);

std::string to_string(Task task);
std::string to_string(Modality modality);
std::string to_string(Activation activation);
std::string to_string(FusionKind fusion);

// Toy stand-in for a pretrained backbone: per-frame affine + Mish, then
// attentive statistics pooling (speech) or mean pooling (text), then an
// affine projection to `embed`.
struct EncoderCfg {
  Modality modality = Modality::kSpeech;
  std::size_t input_dim = 16;
  std::size_t hidden = 16;
  std::size_t attention_dim = 8;  // speech only
  std::size_t embed = 16;

  std::size_t pooled_dim() const { return modality == Modality::kSpeech ? 2 * hidden : hidden; }
  std::string prefix() const { return to_string(modality); }
  void validate() const;
};

struct FusionHeadCfg {
  FusionKind fusion = FusionKind::kConcat;
  Activation activation = Activation::kMish;
  Task task = Task::kCategorical;
  std::size_t input_dim = 32;

  std::size_t output_dim() const { return model::output_dim(task); }
  void validate() const;
};

// Single-head scaled dot-product attention, text frames as queries and
// speech frames as keys/values, projected to a shared width.
struct CrossAttentionCfg {
  std::size_t speech_dim = 16;
  std::size_t text_dim = 16;
  std::size_t model_dim = 16;

  void validate() const;
};

}  // namespace serlab::model
