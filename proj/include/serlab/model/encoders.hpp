#pragma once

#include "serlab/model/layers.hpp"

namespace serlab::model {

// Parameters live under "<modality>.frame", "<modality>.att" (speech only)
// and "<modality>.proj".
void init_encoder(ParamStore& params, const EncoderCfg& cfg, Rng& rng);

// Per-frame hidden states, T x hidden.
Var encoder_frames(Tape& tape, const ParamStore& params, const EncoderCfg& cfg, Var frames);

// Fixed-size embedding [embed], independent of T.
Var encoder_forward(Tape& tape, const ParamStore& params, const EncoderCfg& cfg, Var frames);
Tensor encoder_forward(const ParamStore& params, const EncoderCfg& cfg, const Tensor& frames);

// Names of every tensor init_encoder creates for `cfg`.
std::vector<std::string> encoder_param_names(const EncoderCfg& cfg);

}  // namespace serlab::model
