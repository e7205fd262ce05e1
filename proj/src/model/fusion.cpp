#include "serlab/model/fusion.hpp"

#include <cmath>

#include "serlab/common/error.hpp"

namespace serlab::model {

void init_fusion_head(ParamStore& params, const FusionHeadCfg& cfg, Rng& rng) {
  cfg.validate();
  init_affine(params, "head.fc1", cfg.input_dim, cfg.input_dim, rng);
  init_affine(params, "head.fc2", cfg.input_dim, cfg.output_dim(), rng);
}

std::vector<std::string> fusion_head_param_names() {
  return {"head.fc1.W", "head.fc1.b", "head.fc2.W", "head.fc2.b"};
}

Var fusion_head_forward(Tape& tape, const ParamStore& params, const FusionHeadCfg& cfg, Var fused) {
  const Tensor& w2 = params.value("head.fc2.W");
  if (w2.cols() != cfg.output_dim()) {
    throw ValidationError("fusion head: fc2 width " + std::to_string(w2.cols()) + " does not match task " +
                          to_string(cfg.task));
  }
  Var hidden = activate(affine(tape, params, "head.fc1", fused), cfg.activation);
  return affine(tape, params, "head.fc2", hidden);
}

Tensor fusion_head_forward(const ParamStore& params, const FusionHeadCfg& cfg, const Tensor& fused) {
  Tape tape;
  return fusion_head_forward(tape, params, cfg, tape.constant(fused)).value();
}

void init_cross_attention(ParamStore& params, const CrossAttentionCfg& cfg, Rng& rng) {
  cfg.validate();
  auto projection = [&](const std::string& name, std::size_t in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::vector<double> w(in * cfg.model_dim);
    for (double& v : w) v = rng.uniform(-bound, bound);
    params.add(name, Tensor::matrix(in, cfg.model_dim, std::move(w)));
  };
  projection("xattn.q.W", cfg.text_dim);
  projection("xattn.k.W", cfg.speech_dim);
  projection("xattn.v.W", cfg.speech_dim);
}

std::vector<std::string> cross_attention_param_names() { return {"xattn.k.W", "xattn.q.W", "xattn.v.W"}; }

CrossAttention cross_attention_fuse(Tape& tape, const ParamStore& params, const CrossAttentionCfg& cfg,
                                    Var speech_frames, Var text_frames) {
  if (!speech_frames.valid() || speech_frames.value().empty()) {
    throw ValidationError("cross_attention_fuse: empty speech sequence");
  }
  if (!text_frames.valid() || text_frames.value().empty()) {
    throw ValidationError("cross_attention_fuse: empty text sequence");
  }
  Var wq = tape.parameter(params, "xattn.q.W");
  Var wk = tape.parameter(params, "xattn.k.W");
  Var wv = tape.parameter(params, "xattn.v.W");
  Var q = numerics::matmul(text_frames, wq);    // Tt x D
  Var k = numerics::matmul(speech_frames, wk);  // Ts x D
  Var v = numerics::matmul(speech_frames, wv);  // Ts x D
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(cfg.model_dim));
  Var scores = numerics::scale(numerics::matmul(q, numerics::transpose(k)), inv_sqrt);
  Var weights = numerics::softmax(scores, 1);
  Var attended = numerics::matmul(weights, v);  // Tt x D
  return {numerics::mean(attended, 0), weights};
}

}  // namespace serlab::model
