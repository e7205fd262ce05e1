#include "serlab/llm/client.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "serlab/common/error.hpp"

namespace serlab::llm {

void LlmEndpointConfig::validate() const {
  if (!(timeout_seconds > 0.0)) throw ValidationError("llm timeout must be > 0");
  if (max_retries < 0) throw ValidationError("llm max retries must be >= 0");
  if (parallelism == 0) throw ValidationError("llm parallelism must be >= 1");
  if (model.empty()) throw ValidationError("llm model name is required");
  if (base_url.rfind("http://", 0) != 0 && base_url.rfind("https://", 0) != 0) {
    throw ValidationError("llm base url must start with http:// or https://");
  }
}

namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://") + 3;
  const auto slash = url.find('/', scheme_end);
  if (slash == std::string::npos) return {url, ""};
  std::string path = url.substr(slash);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {url.substr(0, slash), path};
}

bool retryable(const Completion& c) {
  return c.status == Completion::Status::kTransport ||
         (c.status == Completion::Status::kHttp && (c.http_status >= 500 || c.http_status == 429));
}

Completion attempt(httplib::Client& client, const std::string& path, const std::string& body,
                   const httplib::Headers& headers) {
  auto res = client.Post(path, headers, body, "application/json");
  Completion c;
  if (!res) {
    c.status = Completion::Status::kTransport;
    c.detail = httplib::to_string(res.error());
    return c;
  }
  c.http_status = res->status;
  if (res->status < 200 || res->status >= 300) {
    c.status = Completion::Status::kHttp;
    c.detail = "HTTP " + std::to_string(res->status);
    return c;
  }
  auto j = nlohmann::json::parse(res->body, nullptr, false);
  try {
    if (j.is_discarded()) throw std::runtime_error("response is not JSON");
    c.content = j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const std::exception& e) {
    c.status = Completion::Status::kProtocol;
    c.detail = std::string("malformed completion: ") + e.what();
  }
  return c;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

Completion chat_completion(const LlmEndpointConfig& cfg, const std::string& prompt) {
  const auto [origin, prefix] = split_url(cfg.base_url);
  httplib::Client client(origin);
  const auto secs = static_cast<time_t>(cfg.timeout_seconds);
  const auto usecs = static_cast<time_t>((cfg.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);
  const nlohmann::json body = {
      {"model", cfg.model}, {"messages", {{{"role", "user"}, {"content", prompt}}}}, {"temperature", 0}};
  const std::string payload = body.dump();
  Completion c;
  for (int i = 0; i <= cfg.max_retries; ++i) {
    c = attempt(client, prefix + "/chat/completions", payload, headers);
    if (!retryable(c)) break;
    if (i < cfg.max_retries) std::this_thread::sleep_for(std::chrono::milliseconds(100 << i));
  }
  return c;
}

ResponseCache::ResponseCache(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j.contains("prompt_sha256") ||
        !j.contains("raw")) {
      throw ValidationError(path_.filename().string() + " line " + std::to_string(line_no) +
                            ": malformed cache entry");
    }
    entries_[{j["id"].get<std::string>(), j["prompt_sha256"].get<std::string>()}] = j["raw"].get<std::string>();
  }
}

std::optional<std::string> ResponseCache::find(const std::string& id, const std::string& prompt_sha256) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find({id, prompt_sha256});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::append(const std::string& id, const std::string& prompt_sha256, const std::string& raw) {
  std::lock_guard lock(mu_);
  entries_[{id, prompt_sha256}] = raw;
  if (path_.empty()) return;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw std::runtime_error("cannot append to cache '" + path_.string() + "'");
  const nlohmann::json j = {{"id", id}, {"prompt_sha256", prompt_sha256}, {"raw", raw}, {"timestamp", utc_timestamp()}};
  out << j.dump() << '\n';
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

}  // namespace serlab::llm
