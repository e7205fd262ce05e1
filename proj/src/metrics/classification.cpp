#include "serlab/metrics/classification.hpp"

#include <string>

#include "serlab/common/error.hpp"

namespace serlab::metrics {

ClassificationMetrics classification_metrics(std::span<const Emotion> pred, std::span<const Emotion> truth) {
  if (pred.size() != truth.size()) {
    throw ValidationError("classification_metrics: length mismatch " + std::to_string(pred.size()) + " vs " +
                          std::to_string(truth.size()));
  }
  if (pred.empty()) throw ValidationError("classification_metrics: no samples");

  ClassificationMetrics m;
  m.count = pred.size();
  for (std::size_t i = 0; i < pred.size(); ++i) ++m.confusion[index_of(truth[i])][index_of(pred[i])];

  std::size_t tp_total = 0, fp_total = 0, fn_total = 0, n_present = 0;
  double f1_sum = 0.0;
  for (std::size_t c = 0; c < kNumEmotions; ++c) {
    const std::size_t tp = m.confusion[c][c];
    std::size_t fp = 0, fn = 0;
    for (std::size_t k = 0; k < kNumEmotions; ++k) {
      if (k == c) continue;
      fp += m.confusion[k][c];
      fn += m.confusion[c][k];
    }
    tp_total += tp;
    fp_total += fp;
    fn_total += fn;
    const std::size_t denom = 2 * tp + fp + fn;
    m.present[c] = (tp + fp + fn) > 0;
    m.f1[c] = denom == 0 ? 0.0 : static_cast<double>(2 * tp) / static_cast<double>(denom);
    m.recall[c] = (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (m.present[c]) {
      f1_sum += m.f1[c];
      ++n_present;
    }
  }
  m.f1_macro = f1_sum / static_cast<double>(n_present);
  m.f1_micro = static_cast<double>(2 * tp_total) / static_cast<double>(2 * tp_total + fp_total + fn_total);
  m.accuracy = static_cast<double>(tp_total) / static_cast<double>(m.count);
  return m;
}

}  // namespace serlab::metrics
