#include "serlab/trainer/config.hpp"

#include <cmath>

#include "serlab/common/error.hpp"

namespace serlab::trainer {

LossKind parse_loss(std::string_view name) {
  if (name == "ce") return LossKind::kCrossEntropy;
  if (name == "wce") return LossKind::kWeightedCrossEntropy;
  if (name == "focal") return LossKind::kFocal;
  if (name == "ccc" || name == "ccc_loss") return LossKind::kCcc;
  if (name == "mse") return LossKind::kMse;
  throw ValidationError("unknown loss '" + std::string(name) + "' (expected ce|wce|focal|ccc|mse)");
}

SamplerKind parse_sampler(std::string_view name) {
  if (name == "shuffled") return SamplerKind::kShuffled;
  if (name == "balanced") return SamplerKind::kBalanced;
  throw ValidationError("unknown sampler '" + std::string(name) + "' (expected shuffled|balanced)");
}

std::string to_string(LossKind loss) {
  switch (loss) {
    case LossKind::kCrossEntropy: return "ce";
    case LossKind::kWeightedCrossEntropy: return "wce";
    case LossKind::kFocal: return "focal";
    case LossKind::kCcc: return "ccc";
    case LossKind::kMse: return "mse";
  }
  return "?";
}

std::string to_string(SamplerKind sampler) { return sampler == SamplerKind::kShuffled ? "shuffled" : "balanced"; }

bool is_categorical_loss(LossKind loss) {
  return loss == LossKind::kCrossEntropy || loss == LossKind::kWeightedCrossEntropy || loss == LossKind::kFocal;
}

TrainConfig TrainConfig::defaults(int stage) {
  TrainConfig c;
  c.stage = stage;
  c.learning_rate = stage == 2 ? kStage2LearningRate : kStage1LearningRate;
  c.epochs = stage == 2 ? kStage2Epochs : kStage1Epochs;
  return c;
}

LossKind TrainConfig::effective_loss() const {
  if (loss) return *loss;
  return task == Task::kCategorical ? LossKind::kFocal : LossKind::kCcc;
}

void TrainConfig::validate() const {
  if (stage != 1 && stage != 2) throw ValidationError("stage must be 1 or 2");
  const LossKind l = effective_loss();
  if (task == Task::kCategorical && !is_categorical_loss(l)) {
    throw ValidationError("loss '" + to_string(l) + "' does not apply to the categorical task");
  }
  if (task == Task::kAttributes && is_categorical_loss(l)) {
    throw ValidationError("loss '" + to_string(l) + "' does not apply to the attributes task");
  }
  if (sampler == SamplerKind::kBalanced && task != Task::kCategorical) {
    throw ValidationError("balanced sampler needs the categorical task");
  }
  if (batch_size == 0) throw ValidationError("batch size must be >= 1");
  if (sampler == SamplerKind::kBalanced && batch_size % model::kNumEmotions != 0) {
    throw ValidationError("balanced sampler needs a batch size divisible by 8");
  }
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ValidationError("learning rate must be >= 0");
  if (!(focal_gamma >= 0.0) || !std::isfinite(focal_gamma)) throw ValidationError("focal gamma must be >= 0");
  if (hidden == 0 || attention_dim == 0 || embed == 0 || xattn_dim == 0) {
    throw ValidationError("model dimensions must be >= 1");
  }
}

nlohmann::json TrainConfig::to_json() const {
  nlohmann::json j = {{"stage", stage},
                      {"task", model::to_string(task)},
                      {"loss", to_string(effective_loss())},
                      {"sampler", to_string(sampler)},
                      {"activation", model::to_string(activation)},
                      {"batch_size", batch_size},
                      {"learning_rate", learning_rate},
                      {"epochs", epochs},
                      {"focal_gamma", focal_gamma},
                      {"seed", seed}};
  if (stage == 1) {
    j["modality"] = model::to_string(modality);
    j["hidden"] = hidden;
    j["attention_dim"] = attention_dim;
    j["embed"] = embed;
  } else {
    j["fusion"] = model::to_string(fusion);
    if (fusion == FusionKind::kCrossAttention) j["xattn_dim"] = xattn_dim;
  }
  return j;
}

namespace {

nlohmann::json encoder_json(const model::EncoderCfg& e) {
  return {{"modality", model::to_string(e.modality)},
          {"input_dim", e.input_dim},
          {"hidden", e.hidden},
          {"attention_dim", e.attention_dim},
          {"embed", e.embed}};
}

model::EncoderCfg encoder_from(const nlohmann::json& j) {
  model::EncoderCfg e;
  e.modality = model::parse_modality(j.at("modality").get<std::string>());
  e.input_dim = j.at("input_dim").get<std::size_t>();
  e.hidden = j.at("hidden").get<std::size_t>();
  e.attention_dim = j.at("attention_dim").get<std::size_t>();
  e.embed = j.at("embed").get<std::size_t>();
  e.validate();
  return e;
}

}  // namespace

nlohmann::json ModelSpec::to_json() const {
  nlohmann::json j = {{"stage", stage},
                      {"task", model::to_string(task)},
                      {"head",
                       {{"fusion", model::to_string(head.fusion)},
                        {"activation", model::to_string(head.activation)},
                        {"input_dim", head.input_dim},
                        {"output_dim", head.output_dim()}}}};
  if (speech) j["speech"] = encoder_json(*speech);
  if (text) j["text"] = encoder_json(*text);
  if (xattn) {
    j["xattn"] = {{"speech_dim", xattn->speech_dim}, {"text_dim", xattn->text_dim}, {"model_dim", xattn->model_dim}};
  }
  return j;
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
  try {
    ModelSpec s;
    s.stage = j.at("stage").get<int>();
    s.task = model::parse_task(j.at("task").get<std::string>());
    if (j.contains("speech")) s.speech = encoder_from(j.at("speech"));
    if (j.contains("text")) s.text = encoder_from(j.at("text"));
    const auto& h = j.at("head");
    s.head.fusion = model::parse_fusion(h.at("fusion").get<std::string>());
    s.head.activation = model::parse_activation(h.at("activation").get<std::string>());
    s.head.task = s.task;
    s.head.input_dim = h.at("input_dim").get<std::size_t>();
    s.head.validate();
    if (j.contains("xattn")) {
      const auto& x = j.at("xattn");
      s.xattn = model::CrossAttentionCfg{x.at("speech_dim").get<std::size_t>(), x.at("text_dim").get<std::size_t>(),
                                         x.at("model_dim").get<std::size_t>()};
      s.xattn->validate();
    }
    if (!s.speech && !s.text) throw ValidationError("model spec has no encoder");
    if (s.stage == 2 && !(s.speech && s.text)) throw ValidationError("stage-2 model spec needs both encoders");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("checkpoint model spec: ") + e.what());
  }
}

}  // namespace serlab::trainer
