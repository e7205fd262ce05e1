#include "serlab/model/config.hpp"

#include "serlab/common/error.hpp"

namespace serlab::model {

std::size_t output_dim(Task task) { return task == Task::kCategorical ? kNumEmotions : kNumAttributes; }

Task parse_task(std::string_view name) {
  if (name == "categorical") return Task::kCategorical;
  if (name == "attributes") return Task::kAttributes;
  throw ValidationError("unknown task '" + std::string(name) + "' (expected categorical|attributes)");
}

Modality parse_modality(std::string_view name) {
  if (name == "speech") return Modality::kSpeech;
  if (name == "text") return Modality::kText;
  throw ValidationError("unknown modality '" + std::string(name) + "' (expected speech|text)");
}

Activation parse_activation(std::string_view name) {
  if (name == "mish") return Activation::kMish;
  if (name == "relu") return Activation::kRelu;
  throw ValidationError("unknown activation '" + std::string(name) + "' (expected mish|relu)");
}

FusionKind parse_fusion(std::string_view name) {
  if (name == "concat") return FusionKind::kConcat;
  if (name == "cross-attn" || name == "cross_attention") return FusionKind::kCrossAttention;
  throw ValidationError("unknown fusion '" + std::string(name) + "' (expected concat|cross-attn)");
}

std::string to_string(Task task) { return task == Task::kCategorical ? "categorical" : "attributes"; }
std::string to_string(Modality modality) { return modality == Modality::kSpeech ? "speech" : "text"; }
std::string to_string(Activation activation) { return activation == Activation::kMish ? "mish" : "relu"; }
std::string to_string(FusionKind fusion) { return fusion == FusionKind::kConcat ? "concat" : "cross-attn"; }

void EncoderCfg::validate() const {
  if (input_dim == 0 || hidden == 0 || embed == 0 || (modality == Modality::kSpeech && attention_dim == 0)) {
    throw ValidationError(to_string(modality) + " encoder dimensions must all be >= 1");
  }
}

void FusionHeadCfg::validate() const {
  if (input_dim == 0) throw ValidationError("fusion head input dim must be >= 1");
}

void CrossAttentionCfg::validate() const {
  if (speech_dim == 0 || text_dim == 0 || model_dim == 0) {
    throw ValidationError("cross-attention dimensions must all be >= 1");
  }
}

}  // namespace serlab::model
