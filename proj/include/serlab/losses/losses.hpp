#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "serlab/numerics/autodiff.hpp"

namespace serlab::losses {

using numerics::Tape;
using numerics::Tensor;
using numerics::Var;

inline constexpr std::size_t kNumClasses = 8;

// Strictly positive weight per emotion class.
struct ClassWeights {
  std::array<double, kNumClasses> weights{1, 1, 1, 1, 1, 1, 1, 1};

  static ClassWeights uniform() { return {}; }
  void validate() const;
};

struct FocalConfig {
  double gamma = 2.0;
  ClassWeights alpha = ClassWeights::uniform();

  void validate() const;
};

// w_c = N / (K * count_c). Every class must occur at least once.
ClassWeights class_weights_from_counts(std::span<const std::size_t> counts);

// Mean of -log softmax(logits_i)[y_i].
Var cross_entropy(Var logits, std::span<const std::size_t> targets);
// sum_i w_{y_i} * nll_i / sum_i w_{y_i}.
Var weighted_cross_entropy(Var logits, std::span<const std::size_t> targets, const ClassWeights& weights);
// Batch mean of alpha_{y_i} (1 - p_i)^gamma (-log p_i).
Var focal_loss(Var logits, std::span<const std::size_t> targets, const FocalConfig& cfg);

double cross_entropy(const Tensor& logits, std::span<const std::size_t> targets);
double weighted_cross_entropy(const Tensor& logits, std::span<const std::size_t> targets, const ClassWeights& weights);
double focal_loss(const Tensor& logits, std::span<const std::size_t> targets, const FocalConfig& cfg);

// Lin's concordance correlation coefficient with population (1/N) moments.
// Throws when N < 2 or when the denominator is below 1e-15.
double ccc(std::span<const double> pred, std::span<const double> truth);

inline constexpr double kDegenerateCccThreshold = 1e-15;

// 1 - mean over columns of CCC(pred[:, j], truth[:, j]) for B x 3 inputs.
Var ccc_loss(Var pred, Var truth);
double ccc_loss(const Tensor& pred, const Tensor& truth);

// Mean squared error over every entry.
Var mse_loss(Var pred, Var truth);

}  // namespace serlab::losses
