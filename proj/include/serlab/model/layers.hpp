#pragma once

#include <string>

#include "serlab/common/rng.hpp"
#include "serlab/model/config.hpp"
#include "serlab/numerics/autodiff.hpp"

namespace serlab::model {

using numerics::ParamStore;
using numerics::Tape;
using numerics::Tensor;
using numerics::Var;

inline constexpr double kStatPoolEpsilon = 1e-9;

// W (in x out) ~ U(-1/sqrt(in), 1/sqrt(in)), b = 0, stored as
// `<prefix>.W` and `<prefix>.b`.
void init_affine(ParamStore& params, const std::string& prefix, std::size_t in, std::size_t out, Rng& rng);

// x W + b for x of shape [in] or [rows, in].
Var affine(Tape& tape, const ParamStore& params, const std::string& prefix, Var x);

Var activate(Var x, Activation activation);

// Attention scorer: `<prefix>.W` (D x A), `<prefix>.b` (A), `<prefix>.v` (A), `<prefix>.k` (1).
void init_attentive_pool(ParamStore& params, const std::string& prefix, std::size_t dim,
                         std::size_t attention_dim, Rng& rng);

struct AttentivePool {
  Var pooled;   // [2D]: weighted mean then weighted std
  Var weights;  // [T], sums to 1
};

// e_t = v . tanh(W^T h_t + b) + k, alpha = softmax(e),
// mu = sum alpha_t h_t, sigma = sqrt(max(sum alpha_t h_t^2 - mu^2, 0) + eps).
AttentivePool attentive_stat_pool(Tape& tape, const ParamStore& params, const std::string& prefix, Var frames);
Tensor attentive_stat_pool(const Tensor& frames, const ParamStore& params, const std::string& prefix);

// Column means of a T x D frame matrix.
Var mean_pool(Var frames);
Tensor mean_pool(const Tensor& frames);

// (speech, text) order is fixed.
Var concat_fuse(Var speech, Var text);
Tensor concat_fuse(const Tensor& speech, const Tensor& text);

}  // namespace serlab::model
