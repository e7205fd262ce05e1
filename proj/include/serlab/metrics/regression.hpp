#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "serlab/metrics/emotion.hpp"

namespace serlab::metrics {

enum class Attribute { kArousal, kValence, kDominance };

Attribute parse_attribute(std::string_view name);
std::string to_string(Attribute a);
double attribute_value(const AttributeVector& v, Attribute a);
std::vector<double> column(std::span<const AttributeVector> rows, Attribute a);

struct AttributeMetrics {
  double valence = 0.0;
  double arousal = 0.0;
  double dominance = 0.0;
  double average = 0.0;
  std::size_t count = 0;
};

AttributeMetrics attribute_metrics(std::span<const AttributeVector> pred, std::span<const AttributeVector> truth);

struct BinResult {
  double lo = 0.0;
  double hi = 0.0;
  bool closed_hi = false;
  std::size_t count = 0;
  std::optional<double> ccc;
  std::string status;  // "ok", "insufficient" (< 2 samples) or "degenerate"

  std::string label() const;  // "[1, 3)" / "[5, 7]"
};

// Bins [e0,e1), [e1,e2), ..., [e_{k-1}, e_k] keyed on the ground truth; the
// last bin is closed. Samples outside [e0, e_k] fall in no bin.
std::vector<BinResult> binned_ccc(std::span<const double> pred, std::span<const double> truth,
                                  std::span<const double> edges);

struct PredictionStats {
  double mean = 0.0;
  double std = 0.0;  // population

  // "m±s" with two decimals.
  std::string format() const;
};

PredictionStats prediction_stats(std::span<const double> values);

struct ModelComparison {
  std::vector<std::size_t> improved;  // indices with SE_A < SE_B
  std::size_t ties = 0;
  std::array<std::size_t, kNumEmotions> improved_counts{};
  std::array<double, kNumEmotions> improved_shares{};
  std::array<std::size_t, kNumEmotions> full_counts{};
  std::array<double, kNumEmotions> full_shares{};
};

// Squared errors of both models against the truth; the improved set is
// where model A's error is strictly lower. Shares are emotion proportions
// inside the improved set and inside the whole set.
ModelComparison compare_models(std::span<const double> pred_a, std::span<const double> pred_b,
                               std::span<const double> truth, std::span<const Emotion> emotions);

}  // namespace serlab::metrics
