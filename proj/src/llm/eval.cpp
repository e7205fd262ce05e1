#include "serlab/llm/eval.hpp"

#include <atomic>
#include <fstream>
#include <set>
#include <thread>

#include "serlab/common/error.hpp"
#include "serlab/common/hash.hpp"
#include "serlab/llm/parse.hpp"
#include "serlab/llm/prompts.hpp"

namespace serlab::llm {

nlohmann::json LlmRunResult::failure_report() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& f : failures) {
    list.push_back({{"id", f.id}, {"kind", f.kind}, {"http_status", f.http_status}, {"detail", f.detail}, {"raw", f.raw}});
  }
  return {{"parsed", predictions.items.size()},
          {"failed", failures.size()},
          {"clamped", clamped},
          {"network_calls", network_calls},
          {"cache_hits", cache_hits},
          {"failures", list}};
}

namespace {

struct Slot {
  std::optional<std::string> raw;
  std::optional<LlmFailure> failure;
  bool cached = false;
};

const char* kind_of(Completion::Status s) {
  switch (s) {
    case Completion::Status::kTransport: return "transport";
    case Completion::Status::kHttp: return "http";
    case Completion::Status::kProtocol: return "protocol";
    case Completion::Status::kOk: break;
  }
  return "ok";
}

}  // namespace

LlmRunResult run_llm_eval(const LlmEndpointConfig& cfg, model::Task task, std::span<const LlmItem> items) {
  cfg.validate();
  std::set<std::string> ids;
  for (const auto& it : items) {
    if (!ids.insert(it.id).second) throw ValidationError("duplicate transcript id '" + it.id + "'");
  }
  ResponseCache cache(cfg.cache_path);
  std::vector<std::string> prompts, hashes;
  for (const auto& it : items) {
    prompts.push_back(build_prompt(task, it.transcript));
    hashes.push_back(sha256_hex(std::string_view(prompts.back())));
  }

  std::vector<Slot> slots(items.size());
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (auto hit = cache.find(items[i].id, hashes[i])) {
      slots[i].raw = std::move(*hit);
      slots[i].cached = true;
    } else {
      pending.push_back(i);
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> calls{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < pending.size(); k = next++) {
      const std::size_t i = pending[k];
      ++calls;
      Completion c = chat_completion(cfg, prompts[i]);
      if (c.status == Completion::Status::kOk) {
        cache.append(items[i].id, hashes[i], c.content);
        slots[i].raw = std::move(c.content);
      } else {
        slots[i].failure = LlmFailure{items[i].id, kind_of(c.status), c.http_status, c.detail, ""};
      }
    }
  };
  const std::size_t n_threads = std::min(cfg.parallelism, pending.size());
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  LlmRunResult result;
  result.network_calls = calls.load();
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto& slot = slots[i];
    result.cache_hits += slot.cached;
    if (slot.failure) {
      result.failures.push_back(std::move(*slot.failure));
      continue;
    }
    dataio::Prediction p{items[i].id, {}, {}};
    if (task == model::Task::kCategorical) {
      auto parsed = parse_categorical_response(*slot.raw);
      if (auto* f = std::get_if<ParseFailure>(&parsed)) {
        result.failures.push_back({items[i].id, "parse", 0, f->reason, f->raw});
        continue;
      }
      p.emotion = std::get<metrics::Emotion>(parsed);
    } else {
      auto parsed = parse_attribute_response(*slot.raw);
      if (auto* f = std::get_if<ParseFailure>(&parsed)) {
        result.failures.push_back({items[i].id, "parse", 0, f->reason, f->raw});
        continue;
      }
      const auto& a = std::get<ParsedAttributes>(parsed);
      p.attributes = a.value;
      result.clamped += a.clamped;
    }
    result.predictions.items.push_back(std::move(p));
  }
  return result;
}

std::vector<LlmItem> read_transcripts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::vector<LlmItem> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j.contains("transcript") ||
        !j["id"].is_string() || !j["transcript"].is_string()) {
      throw ValidationError(path.filename().string() + " line " + std::to_string(line_no) +
                            ": expected {\"id\": string, \"transcript\": string}");
    }
    out.push_back({j["id"].get<std::string>(), j["transcript"].get<std::string>()});
  }
  return out;
}

}  // namespace serlab::llm
