#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "serlab/dataio/labels.hpp"
#include "serlab/llm/client.hpp"
#include "serlab/model/config.hpp"

namespace serlab::llm {

struct LlmItem {
  std::string id;
  std::string transcript;
};

struct LlmFailure {
  std::string id;
  std::string kind;  // "transport", "http", "protocol" or "parse"
  int http_status = 0;
  std::string detail;
  std::string raw;
};

struct LlmRunResult {
  // Successful parses only, in input order.
  dataio::PredictionSet predictions;
  std::vector<LlmFailure> failures;
  std::size_t network_calls = 0;
  std::size_t cache_hits = 0;
  std::size_t clamped = 0;

  nlohmann::json failure_report() const;
};

// Responses are taken from the cache when (id, prompt hash) is present;
// otherwise fetched with up to cfg.parallelism requests in flight and
// appended to the cache.
LlmRunResult run_llm_eval(const LlmEndpointConfig& cfg, model::Task task, std::span<const LlmItem> items);

// Reads JSONL lines {"id": ..., "transcript": ...}.
std::vector<LlmItem> read_transcripts(const std::filesystem::path& path);

}  // namespace serlab::llm
