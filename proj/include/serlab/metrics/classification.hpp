#pragma once

#include <array>
#include <span>

#include "serlab/metrics/emotion.hpp"

namespace serlab::metrics {

// confusion[truth][pred]
using ConfusionMatrix = std::array<std::array<std::size_t, kNumEmotions>, kNumEmotions>;

struct ClassificationMetrics {
  ConfusionMatrix confusion{};
  std::array<double, kNumEmotions> f1{};
  // Class occurs in truth or predictions; only these enter the macro mean.
  std::array<bool, kNumEmotions> present{};
  std::array<double, kNumEmotions> recall{};
  double f1_macro = 0.0;
  double f1_micro = 0.0;
  double accuracy = 0.0;
  std::size_t count = 0;
};

ClassificationMetrics classification_metrics(std::span<const Emotion> pred, std::span<const Emotion> truth);

}  // namespace serlab::metrics
