#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>

namespace serlab::llm {

struct LlmEndpointConfig {
  // e.g. "http://localhost:8000/v1"; requests go to <base_url>/chat/completions.
  std::string base_url;
  std::string model;
  double timeout_seconds = 60.0;
  int max_retries = 2;
  std::filesystem::path cache_path;
  std::size_t parallelism = 4;
  // Sent as a bearer token when non-empty.
  std::string api_key;

  void validate() const;
};

struct Completion {
  enum class Status { kOk, kTransport, kHttp, kProtocol };
  Status status = Status::kOk;
  int http_status = 0;
  std::string content;  // message content when kOk
  std::string detail;
};

// POST {model, messages: [{role: user, content: prompt}], temperature: 0};
// reads choices[0].message.content. Transport failures and 5xx/429 are
// retried up to max_retries times.
Completion chat_completion(const LlmEndpointConfig& cfg, const std::string& prompt);

// Append-only JSONL of {id, prompt_sha256, raw, timestamp}. Later lines for
// the same (id, prompt_sha256) win on load.
class ResponseCache {
 public:
  ResponseCache() = default;
  explicit ResponseCache(std::filesystem::path path);

  std::optional<std::string> find(const std::string& id, const std::string& prompt_sha256) const;
  void append(const std::string& id, const std::string& prompt_sha256, const std::string& raw);
  std::size_t size() const;

 private:
  std::filesystem::path path_;
  std::map<std::pair<std::string, std::string>, std::string> entries_;
  mutable std::mutex mu_;
};

}  // namespace serlab::llm
