#include "serlab/model/encoders.hpp"

#include "serlab/common/error.hpp"

namespace serlab::model {

void init_encoder(ParamStore& params, const EncoderCfg& cfg, Rng& rng) {
  cfg.validate();
  const std::string p = cfg.prefix();
  init_affine(params, p + ".frame", cfg.input_dim, cfg.hidden, rng);
  if (cfg.modality == Modality::kSpeech) init_attentive_pool(params, p + ".att", cfg.hidden, cfg.attention_dim, rng);
  init_affine(params, p + ".proj", cfg.pooled_dim(), cfg.embed, rng);
}

std::vector<std::string> encoder_param_names(const EncoderCfg& cfg) {
  const std::string p = cfg.prefix();
  std::vector<std::string> names{p + ".frame.W", p + ".frame.b"};
  if (cfg.modality == Modality::kSpeech) {
    for (const char* s : {".att.W", ".att.b", ".att.v", ".att.k"}) names.push_back(p + s);
  }
  names.push_back(p + ".proj.W");
  names.push_back(p + ".proj.b");
  return names;
}

Var encoder_frames(Tape& tape, const ParamStore& params, const EncoderCfg& cfg, Var frames) {
  if (!frames.valid() || frames.value().empty()) {
    throw ValidationError(to_string(cfg.modality) + " encoder: empty sequence");
  }
  const Tensor& x = frames.value();
  if (x.rank() != 2 || x.cols() != cfg.input_dim) {
    throw ValidationError(to_string(cfg.modality) + " encoder expects frames of width " +
                          std::to_string(cfg.input_dim) + ", got shape " + numerics::shape_str(x.shape()));
  }
  return numerics::mish(affine(tape, params, cfg.prefix() + ".frame", frames));
}

Var encoder_forward(Tape& tape, const ParamStore& params, const EncoderCfg& cfg, Var frames) {
  Var hidden = encoder_frames(tape, params, cfg, frames);
  Var pooled = cfg.modality == Modality::kSpeech
                   ? attentive_stat_pool(tape, params, cfg.prefix() + ".att", hidden).pooled
                   : mean_pool(hidden);
  return affine(tape, params, cfg.prefix() + ".proj", pooled);
}

Tensor encoder_forward(const ParamStore& params, const EncoderCfg& cfg, const Tensor& frames) {
  if (frames.empty()) throw ValidationError(to_string(cfg.modality) + " encoder: empty sequence");
  Tape tape;
  return encoder_forward(tape, params, cfg, tape.constant(frames)).value();
}

}  // namespace serlab::model
