#include "serlab/losses/losses.hpp"

#include <cmath>
#include <numeric>

#include "serlab/common/error.hpp"

namespace serlab::losses {
namespace {

void check_targets(Var logits, std::span<const std::size_t> targets, const char* op) {
  const Tensor& x = logits.value();
  if (x.rank() != 2) throw ValidationError(std::string(op) + ": logits must be B x C");
  if (targets.size() != x.rows()) {
    throw ValidationError(std::string(op) + ": " + std::to_string(targets.size()) + " targets for " +
                          std::to_string(x.rows()) + " rows");
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] >= x.cols()) {
      throw ValidationError(std::string(op) + ": class id " + std::to_string(targets[i]) + " at row " +
                            std::to_string(i) + " out of range [0," + std::to_string(x.cols()) + ")");
    }
  }
}

// -log softmax(logits)[target] per row.
Var per_sample_nll(Var logits, std::span<const std::size_t> targets) {
  return numerics::scale(numerics::pick(numerics::log_softmax(logits, 1), targets), -1.0);
}

template <typename Fn>
double eager(const Tensor& logits, Fn&& fn) {
  Tape tape;
  return fn(tape.constant(logits)).value()[0];
}

}  // namespace

void ClassWeights::validate() const {
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (!(weights[c] > 0.0) || !std::isfinite(weights[c])) {
      throw ValidationError("class weight " + std::to_string(c) + " must be finite and > 0");
    }
  }
}

void FocalConfig::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ValidationError("focal gamma must be >= 0");
  alpha.validate();
}

ClassWeights class_weights_from_counts(std::span<const std::size_t> counts) {
  if (counts.size() != kNumClasses) {
    throw ValidationError("class_weights_from_counts: expected 8 counts, got " + std::to_string(counts.size()));
  }
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  ClassWeights out;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (counts[c] == 0) {
      throw ValidationError("class absent from training split (class " + std::to_string(c) + ")");
    }
    out.weights[c] = static_cast<double>(total) / (static_cast<double>(kNumClasses) * static_cast<double>(counts[c]));
  }
  return out;
}

Var cross_entropy(Var logits, std::span<const std::size_t> targets) {
  check_targets(logits, targets, "cross_entropy");
  return numerics::mean(per_sample_nll(logits, targets), 0);
}

Var weighted_cross_entropy(Var logits, std::span<const std::size_t> targets, const ClassWeights& weights) {
  check_targets(logits, targets, "weighted_cross_entropy");
  weights.validate();
  std::vector<double> w(targets.size());
  double total = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    w[i] = weights.weights.at(targets[i]);
    total += w[i];
  }
  Var wv = logits.tape().constant(Tensor::vector(std::move(w)));
  Var weighted = numerics::sum(numerics::mul(per_sample_nll(logits, targets), wv));
  return numerics::scale(weighted, 1.0 / total);
}

Var focal_loss(Var logits, std::span<const std::size_t> targets, const FocalConfig& cfg) {
  check_targets(logits, targets, "focal_loss");
  cfg.validate();
  Tape& tape = logits.tape();
  Var log_p = numerics::pick(numerics::log_softmax(logits, 1), targets);
  Var nll = numerics::scale(log_p, -1.0);
  Var one_minus_p = numerics::shift(numerics::scale(numerics::exp(log_p), -1.0), 1.0);
  Var modulator = numerics::pow(numerics::clamp_min(one_minus_p, 0.0), cfg.gamma);
  std::vector<double> a(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) a[i] = cfg.alpha.weights.at(targets[i]);
  Var alpha = tape.constant(Tensor::vector(std::move(a)));
  return numerics::mean(numerics::mul(alpha, numerics::mul(modulator, nll)), 0);
}

double cross_entropy(const Tensor& logits, std::span<const std::size_t> targets) {
  return eager(logits, [&](Var x) { return cross_entropy(x, targets); });
}

double weighted_cross_entropy(const Tensor& logits, std::span<const std::size_t> targets,
                              const ClassWeights& weights) {
  return eager(logits, [&](Var x) { return weighted_cross_entropy(x, targets, weights); });
}

double focal_loss(const Tensor& logits, std::span<const std::size_t> targets, const FocalConfig& cfg) {
  return eager(logits, [&](Var x) { return focal_loss(x, targets, cfg); });
}

double ccc(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) {
    throw ValidationError("ccc: length mismatch " + std::to_string(pred.size()) + " vs " +
                          std::to_string(truth.size()));
  }
  const std::size_t n = pred.size();
  if (n < 2) throw ValidationError("ccc: need at least 2 samples, got " + std::to_string(n));
  const double inv_n = 1.0 / static_cast<double>(n);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += pred[i];
    my += truth[i];
  }
  mx *= inv_n;
  my *= inv_n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = pred[i] - mx;
    const double dy = truth[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  sxx *= inv_n;
  syy *= inv_n;
  sxy *= inv_n;
  const double gap = mx - my;
  const double denom = sxx + syy + gap * gap;
  if (denom < kDegenerateCccThreshold) throw ValidationError("degenerate CCC (zero variance and zero mean gap)");
  return 2.0 * sxy / denom;
}

Var ccc_loss(Var pred, Var truth) {
  const Tensor& p = pred.value();
  const Tensor& t = truth.value();
  if (p.rank() != 2 || p.shape() != t.shape()) {
    throw ValidationError("ccc_loss: expected matching B x K inputs, got " + numerics::shape_str(p.shape()) +
                          " and " + numerics::shape_str(t.shape()));
  }
  if (p.rows() < 2) throw ValidationError("ccc_loss: need a batch of at least 2");

  Var mp = numerics::mean(pred, 0);
  Var mt = numerics::mean(truth, 0);
  Var dp = numerics::add_row(pred, numerics::scale(mp, -1.0));
  Var dt = numerics::add_row(truth, numerics::scale(mt, -1.0));
  Var spp = numerics::mean(numerics::square(dp), 0);
  Var stt = numerics::mean(numerics::square(dt), 0);
  Var spt = numerics::mean(numerics::mul(dp, dt), 0);
  Var gap = numerics::square(numerics::sub(mp, mt));
  Var denom = numerics::add(numerics::add(spp, stt), gap);
  for (std::size_t j = 0; j < denom.value().size(); ++j) {
    if (denom.value()[j] < kDegenerateCccThreshold) {
      throw ValidationError("ccc_loss: degenerate CCC in column " + std::to_string(j));
    }
  }
  Var per_column = numerics::div(numerics::scale(spt, 2.0), denom);
  return numerics::shift(numerics::scale(numerics::mean(per_column, 0), -1.0), 1.0);
}

double ccc_loss(const Tensor& pred, const Tensor& truth) {
  Tape tape;
  return ccc_loss(tape.constant(pred), tape.constant(truth)).value()[0];
}

Var mse_loss(Var pred, Var truth) {
  if (pred.shape() != truth.shape()) throw ValidationError("mse_loss: shape mismatch");
  Var sq = numerics::square(numerics::sub(pred, truth));
  if (sq.value().rank() == 1) return numerics::mean(sq, 0);
  return numerics::mean(numerics::reshape(sq, {sq.value().size()}), 0);
}

}  // namespace serlab::losses
