#pragma once

#include <vector>

#include "serlab/model/layers.hpp"

namespace serlab::model {

// head.fc1 (F -> F) and head.fc2 (F -> 8 or 3).
void init_fusion_head(ParamStore& params, const FusionHeadCfg& cfg, Rng& rng);
std::vector<std::string> fusion_head_param_names();

// FC2(act(FC1(fused))). `fused` is [F] or a batch [B, F].
Var fusion_head_forward(Tape& tape, const ParamStore& params, const FusionHeadCfg& cfg, Var fused);
Tensor fusion_head_forward(const ParamStore& params, const FusionHeadCfg& cfg, const Tensor& fused);

// xattn.q.W (text_dim x D), xattn.k.W and xattn.v.W (speech_dim x D).
void init_cross_attention(ParamStore& params, const CrossAttentionCfg& cfg, Rng& rng);
std::vector<std::string> cross_attention_param_names();

struct CrossAttention {
  Var fused;    // [D]
  Var weights;  // Tt x Ts, rows sum to 1
};

// A = softmax(Q K^T / sqrt(D)) V with Q from text frames and K, V from
// speech frames; the Tt attended rows are mean-pooled.
CrossAttention cross_attention_fuse(Tape& tape, const ParamStore& params, const CrossAttentionCfg& cfg,
                                    Var speech_frames, Var text_frames);

}  // namespace serlab::model
