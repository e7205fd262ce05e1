#include "serlab/metrics/regression.hpp"

#include <cmath>
#include <cstdio>

#include "serlab/common/error.hpp"
#include "serlab/losses/losses.hpp"

namespace serlab::metrics {

Attribute parse_attribute(std::string_view name) {
  if (name == "arousal") return Attribute::kArousal;
  if (name == "valence") return Attribute::kValence;
  if (name == "dominance") return Attribute::kDominance;
  throw ValidationError("unknown attribute '" + std::string(name) + "' (expected arousal|valence|dominance)");
}

std::string to_string(Attribute a) {
  switch (a) {
    case Attribute::kArousal: return "arousal";
    case Attribute::kValence: return "valence";
    case Attribute::kDominance: return "dominance";
  }
  return "?";
}

double attribute_value(const AttributeVector& v, Attribute a) {
  switch (a) {
    case Attribute::kArousal: return v.arousal;
    case Attribute::kValence: return v.valence;
    case Attribute::kDominance: return v.dominance;
  }
  return 0.0;
}

std::vector<double> column(std::span<const AttributeVector> rows, Attribute a) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(attribute_value(r, a));
  return out;
}

AttributeMetrics attribute_metrics(std::span<const AttributeVector> pred, std::span<const AttributeVector> truth) {
  if (pred.size() != truth.size()) throw ValidationError("attribute_metrics: length mismatch");
  if (pred.size() < 2) throw ValidationError("attribute_metrics: need at least 2 samples");
  AttributeMetrics m;
  m.count = pred.size();
  m.valence = losses::ccc(column(pred, Attribute::kValence), column(truth, Attribute::kValence));
  m.arousal = losses::ccc(column(pred, Attribute::kArousal), column(truth, Attribute::kArousal));
  m.dominance = losses::ccc(column(pred, Attribute::kDominance), column(truth, Attribute::kDominance));
  m.average = (m.valence + m.arousal + m.dominance) / 3.0;
  return m;
}

std::string BinResult::label() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "[%g, %g%c", lo, hi, closed_hi ? ']' : ')');
  return buf;
}

std::vector<BinResult> binned_ccc(std::span<const double> pred, std::span<const double> truth,
                                  std::span<const double> edges) {
  if (pred.size() != truth.size()) throw ValidationError("binned_ccc: length mismatch");
  if (edges.size() < 2) throw ValidationError("binned_ccc: need at least two bin edges");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw ValidationError("binned_ccc: edges must be strictly increasing");
  }
  const std::size_t n_bins = edges.size() - 1;
  std::vector<std::vector<double>> bin_pred(n_bins), bin_truth(n_bins);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double t = truth[i];
    for (std::size_t b = 0; b < n_bins; ++b) {
      const bool last = b + 1 == n_bins;
      if (t >= edges[b] && (t < edges[b + 1] || (last && t == edges[b + 1]))) {
        bin_pred[b].push_back(pred[i]);
        bin_truth[b].push_back(t);
        break;
      }
    }
  }
  std::vector<BinResult> out(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    BinResult& r = out[b];
    r.lo = edges[b];
    r.hi = edges[b + 1];
    r.closed_hi = b + 1 == n_bins;
    r.count = bin_truth[b].size();
    if (r.count < 2) {
      r.status = "insufficient";
      continue;
    }
    try {
      r.ccc = losses::ccc(bin_pred[b], bin_truth[b]);
      r.status = "ok";
    } catch (const ValidationError&) {
      r.status = "degenerate";
    }
  }
  return out;
}

std::string PredictionStats::format() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f±%.2f", mean, std);
  return buf;
}

PredictionStats prediction_stats(std::span<const double> values) {
  if (values.empty()) throw ValidationError("prediction_stats: no values");
  const double inv_n = 1.0 / static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean *= inv_n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return {mean, std::sqrt(var * inv_n)};
}

ModelComparison compare_models(std::span<const double> pred_a, std::span<const double> pred_b,
                               std::span<const double> truth, std::span<const Emotion> emotions) {
  const std::size_t n = truth.size();
  if (pred_a.size() != n || pred_b.size() != n || emotions.size() != n) {
    throw ValidationError("compare_models: length mismatch");
  }
  ModelComparison out;
  for (std::size_t i = 0; i < n; ++i) {
    const double se_a = (pred_a[i] - truth[i]) * (pred_a[i] - truth[i]);
    const double se_b = (pred_b[i] - truth[i]) * (pred_b[i] - truth[i]);
    ++out.full_counts[index_of(emotions[i])];
    if (se_a < se_b) {
      out.improved.push_back(i);
      ++out.improved_counts[index_of(emotions[i])];
    } else if (se_a == se_b) {
      ++out.ties;
    }
  }
  for (std::size_t c = 0; c < kNumEmotions; ++c) {
    out.full_shares[c] = n == 0 ? 0.0 : static_cast<double>(out.full_counts[c]) / static_cast<double>(n);
    out.improved_shares[c] = out.improved.empty() ? 0.0
                                                  : static_cast<double>(out.improved_counts[c]) /
                                                        static_cast<double>(out.improved.size());
  }
  return out;
}

}  // namespace serlab::metrics
