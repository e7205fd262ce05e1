#include "serlab/metrics/report.hpp"

#include <cmath>
#include <cstdio>

#include "serlab/common/error.hpp"

namespace serlab::metrics {

std::string format3(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", value);
  // Avoid "-0.000".
  if (std::string_view(buf) == "-0.000") return "0.000";
  return buf;
}

MetricsReport make_report(std::optional<ClassificationMetrics> classification,
                          std::optional<AttributeMetrics> attributes) {
  if (classification && classification->f1_micro != classification->accuracy) {
    throw NumericError("metrics report: F1-micro differs from accuracy");
  }
  MetricsReport r;
  r.classification = std::move(classification);
  r.attributes = std::move(attributes);
  return r;
}

std::string MetricsReport::csv_row() const {
  std::string row;
  auto cell = [&row](std::optional<double> v) { row += v ? format3(*v) : std::string(); };
  const auto& c = classification;
  const auto& a = attributes;
  cell(c ? std::optional(c->f1_macro) : std::nullopt);
  row += ',';
  cell(c ? std::optional(c->f1_micro) : std::nullopt);
  row += ',';
  cell(c ? std::optional(c->accuracy) : std::nullopt);
  row += ',';
  cell(a ? std::optional(a->valence) : std::nullopt);
  row += ',';
  cell(a ? std::optional(a->arousal) : std::nullopt);
  row += ',';
  cell(a ? std::optional(a->dominance) : std::nullopt);
  row += ',';
  cell(a ? std::optional(a->average) : std::nullopt);
  return row;
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  if (classification) {
    const auto& c = *classification;
    nlohmann::json per_class = nlohmann::json::object();
    for (Emotion e : kAllEmotions) {
      const std::size_t i = index_of(e);
      per_class[std::string(1, emotion_code(e))] = {
          {"f1", c.f1[i]}, {"recall", c.recall[i]}, {"present", c.present[i]}};
    }
    nlohmann::json confusion = nlohmann::json::array();
    for (const auto& row : c.confusion) confusion.push_back(row);
    j["classification"] = {{"f1_macro", c.f1_macro},
                           {"f1_micro", c.f1_micro},
                           {"accuracy", c.accuracy},
                           {"count", c.count},
                           {"macro_over", "classes present in truth or predictions"},
                           {"per_class", per_class},
                           {"confusion", confusion}};
  }
  if (attributes) {
    const auto& a = *attributes;
    j["attributes"] = {{"valence", a.valence},
                       {"arousal", a.arousal},
                       {"dominance", a.dominance},
                       {"average", a.average},
                       {"count", a.count}};
  }
  j["missing"] = missing;
  j["csv_header"] = kReportCsvHeader;
  j["csv_row"] = csv_row();
  return j;
}

}  // namespace serlab::metrics
