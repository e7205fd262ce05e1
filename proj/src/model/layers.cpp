#include "serlab/model/layers.hpp"

#include <array>
#include <cmath>

#include "serlab/common/error.hpp"

namespace serlab::model {

void init_affine(ParamStore& params, const std::string& prefix, std::size_t in, std::size_t out, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  std::vector<double> w(in * out);
  for (double& v : w) v = rng.uniform(-bound, bound);
  params.add(prefix + ".W", Tensor::matrix(in, out, std::move(w)));
  params.add(prefix + ".b", Tensor::zeros({out}));
}

Var affine(Tape& tape, const ParamStore& params, const std::string& prefix, Var x) {
  Var w = tape.parameter(params, prefix + ".W");
  Var b = tape.parameter(params, prefix + ".b");
  const std::size_t in = w.value().rows();
  if (x.value().rank() == 1) {
    if (x.value().size() != in) {
      throw ValidationError(prefix + ": expected input width " + std::to_string(in) + ", got " +
                            std::to_string(x.value().size()));
    }
    Var row = numerics::reshape(x, {1, in});
    Var out = numerics::add_row(numerics::matmul(row, w), b);
    return numerics::reshape(out, {w.value().cols()});
  }
  if (x.value().rank() != 2 || x.value().cols() != in) {
    throw ValidationError(prefix + ": expected input width " + std::to_string(in) + ", got shape " +
                          numerics::shape_str(x.shape()));
  }
  return numerics::add_row(numerics::matmul(x, w), b);
}

Var activate(Var x, Activation activation) {
  switch (activation) {
    case Activation::kMish: return numerics::mish(x);
    case Activation::kRelu: return numerics::relu(x);
  }
  throw ValidationError("unknown activation");
}

void init_attentive_pool(ParamStore& params, const std::string& prefix, std::size_t dim,
                         std::size_t attention_dim, Rng& rng) {
  init_affine(params, prefix, dim, attention_dim, rng);
  const double bound = 1.0 / std::sqrt(static_cast<double>(attention_dim));
  std::vector<double> v(attention_dim);
  for (double& x : v) x = rng.uniform(-bound, bound);
  params.add(prefix + ".v", Tensor::vector(std::move(v)));
  params.add(prefix + ".k", Tensor::zeros({1}));
}

AttentivePool attentive_stat_pool(Tape& tape, const ParamStore& params, const std::string& prefix, Var frames) {
  if (!frames.valid() || frames.value().empty()) throw ValidationError("attentive_stat_pool: empty sequence");
  if (frames.value().rank() != 2) {
    throw ValidationError("attentive_stat_pool: expected T x D frames, got " + numerics::shape_str(frames.shape()));
  }
  const std::size_t steps = frames.value().rows();
  Var v = tape.parameter(params, prefix + ".v");
  Var k = tape.parameter(params, prefix + ".k");
  Var hidden = numerics::tanh(affine(tape, params, prefix, frames));                   // T x A
  Var column = numerics::reshape(v, {v.value().size(), 1});                            // A x 1
  Var scores = numerics::add_row(numerics::matmul(hidden, column), k);                 // T x 1
  Var weights = numerics::softmax(numerics::reshape(scores, {steps}), 0);              // T
  Var mu = numerics::weighted_sum(weights, frames);                                    // D
  Var second = numerics::weighted_sum(weights, numerics::square(frames));              // D
  Var var = numerics::clamp_min(numerics::sub(second, numerics::square(mu)), 0.0);
  Var sigma = numerics::sqrt(numerics::shift(var, kStatPoolEpsilon));
  const std::array<Var, 2> parts{mu, sigma};
  return {numerics::concat(parts), weights};
}

Tensor attentive_stat_pool(const Tensor& frames, const ParamStore& params, const std::string& prefix) {
  if (frames.empty()) throw ValidationError("attentive_stat_pool: empty sequence");
  Tape tape;
  return attentive_stat_pool(tape, params, prefix, tape.constant(frames)).pooled.value();
}

Var mean_pool(Var frames) {
  if (!frames.valid() || frames.value().empty()) throw ValidationError("mean_pool: empty sequence");
  if (frames.value().rank() != 2) {
    throw ValidationError("mean_pool: expected T x D frames, got " + numerics::shape_str(frames.shape()));
  }
  return numerics::mean(frames, 0);
}

Tensor mean_pool(const Tensor& frames) {
  if (frames.empty()) throw ValidationError("mean_pool: empty sequence");
  Tape tape;
  return mean_pool(tape.constant(frames)).value();
}

Var concat_fuse(Var speech, Var text) {
  if (!speech.valid() || !text.valid() || speech.value().empty() || text.value().empty()) {
    throw ValidationError("concat_fuse: both operands need length >= 1");
  }
  if (speech.value().rank() != 1 || text.value().rank() != 1) {
    throw ValidationError("concat_fuse: operands must be 1-D");
  }
  const std::array<Var, 2> parts{speech, text};
  return numerics::concat(parts);
}

Tensor concat_fuse(const Tensor& speech, const Tensor& text) {
  if (speech.empty() || text.empty()) throw ValidationError("concat_fuse: both operands need length >= 1");
  Tape tape;
  return concat_fuse(tape.constant(speech), tape.constant(text)).value();
}

}  // namespace serlab::model
