#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "serlab/metrics/classification.hpp"
#include "serlab/metrics/regression.hpp"

namespace serlab::metrics {

inline constexpr const char* kReportCsvHeader = "F1-Macro,F1-Micro,Acc.,Val.,Aro.,Dom.,Avg";

// Either half may be absent, e.g. a categorical-only split. Construction
// through make_report checks micro-F1 == accuracy.
struct MetricsReport {
  std::optional<ClassificationMetrics> classification;
  std::optional<AttributeMetrics> attributes;
  // Truth rows that had no usable prediction and were left out.
  std::size_t missing = 0;

  // Seven cells in header order; empty cells for absent halves.
  std::string csv_row() const;
  nlohmann::json to_json() const;
};

MetricsReport make_report(std::optional<ClassificationMetrics> classification,
                          std::optional<AttributeMetrics> attributes);

// Fixed three decimals, e.g. "0.605".
std::string format3(double value);

}  // namespace serlab::metrics
