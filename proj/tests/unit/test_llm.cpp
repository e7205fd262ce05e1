#include <gtest/gtest.h>

#include <fstream>

#include "mock_llm.hpp"
#include "serlab/common/error.hpp"
#include "serlab/dataio/binary_io.hpp"
#include "serlab/llm/client.hpp"
#include "serlab/llm/eval.hpp"
#include "serlab/llm/parse.hpp"
#include "serlab/llm/prompts.hpp"
#include "test_util.hpp"

using namespace serlab;
using namespace serlab::llm;
using metrics::Emotion;
using serlab::testing::MockLlmServer;
using serlab::testing::TempDir;

namespace {

std::string golden(const std::string& name) { return dataio::read_file(std::string(SERLAB_GOLDEN_DIR) + "/" + name); }

std::vector<LlmItem> items(std::size_t n) {
  std::vector<LlmItem> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({"utt" + std::to_string(i), "transcript number " + std::to_string(i)});
  return out;
}

LlmEndpointConfig endpoint(const MockLlmServer& server, const std::filesystem::path& cache) {
  LlmEndpointConfig cfg;
  cfg.base_url = server.base_url();
  cfg.model = "mock-model";
  cfg.timeout_seconds = 5;
  cfg.max_retries = 1;
  cfg.cache_path = cache;
  return cfg;
}

}  // namespace

TEST(Prompts, GoldenFiles) {
  EXPECT_EQ(build_categorical_prompt("I can't believe it!"), golden("categorical_prompt.txt"));
  EXPECT_EQ(build_attribute_prompt("I can't believe it!"), golden("attribute_prompt.txt"));
  EXPECT_EQ(build_prompt(model::Task::kAttributes, "x"), build_attribute_prompt("x"));
}

TEST(Prompts, SubstitutionArithmetic) {
  for (std::string t : {"a", "I can't believe it!", "line one\nline two", "  spaced  "}) {
    std::string c = build_categorical_prompt(t), a = build_attribute_prompt(t);
    EXPECT_EQ(c.size(), categorical_template().size() + t.size());
    EXPECT_EQ(a.size(), attribute_template().size() + t.size());
    EXPECT_NE(c.find(t), std::string::npos);
    EXPECT_NE(a.find("format of [arousal, valence, dominance]"), std::string::npos);
    EXPECT_NE(c.find("['Anger', 'Contempt', 'Disgust', 'Fear', 'Happiness', 'Neutral', 'Sadness', 'Surprise']"),
              std::string::npos);
  }
  EXPECT_THROW(build_categorical_prompt(""), ValidationError);
  EXPECT_THROW(build_attribute_prompt(""), ValidationError);
}

TEST(Parse, Categorical) {
  EXPECT_EQ(std::get<Emotion>(parse_categorical_response("Anger")), Emotion::kAnger);
  EXPECT_EQ(std::get<Emotion>(parse_categorical_response(" happiness.\n")), Emotion::kHappiness);
  EXPECT_EQ(std::get<Emotion>(parse_categorical_response("'Surprise'")), Emotion::kSurprise);
  auto fail = parse_categorical_response("I think it's joy");
  ASSERT_TRUE(std::holds_alternative<ParseFailure>(fail));
  EXPECT_EQ(std::get<ParseFailure>(fail).raw, "I think it's joy");
  EXPECT_TRUE(std::holds_alternative<ParseFailure>(parse_categorical_response("")));
}

TEST(Parse, Attributes) {
  auto ok = std::get<ParsedAttributes>(parse_attribute_response("[1.0, 2.3, 4.7]"));
  EXPECT_EQ(ok.value.arousal, 1.0);
  EXPECT_EQ(ok.value.valence, 2.3);
  EXPECT_EQ(ok.value.dominance, 4.7);
  EXPECT_FALSE(ok.clamped);
  auto clamped = std::get<ParsedAttributes>(parse_attribute_response("[0.5, 3.0, 9.9]"));
  EXPECT_EQ(clamped.value, (metrics::AttributeVector{1.0, 3.0, 7.0}));
  EXPECT_TRUE(clamped.clamped);
  auto prose = std::get<ParsedAttributes>(parse_attribute_response("Answer: [2, 2, 2] because [7, 7, 7]"));
  EXPECT_EQ(prose.value, (metrics::AttributeVector{2, 2, 2}));
  EXPECT_TRUE(std::holds_alternative<ParseFailure>(parse_attribute_response("fairly calm, slightly positive")));
  EXPECT_TRUE(std::holds_alternative<ParseFailure>(parse_attribute_response("[a, b, c]")));
  EXPECT_TRUE(std::holds_alternative<ParseFailure>(parse_attribute_response("[1.0, 2.0]")));
}

TEST(Parse, FormattedTriplesRoundTrip) {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    metrics::AttributeVector v{rng.uniform(1, 7), rng.uniform(1, 7), rng.uniform(1, 7)};
    std::string text = "[" + dataio::format_double(v.arousal) + ", " + dataio::format_double(v.valence) + ", " +
                       dataio::format_double(v.dominance) + "]";
    auto r = parse_attribute_response(text);
    ASSERT_TRUE(std::holds_alternative<ParsedAttributes>(r)) << text;
    EXPECT_EQ(std::get<ParsedAttributes>(r).value, v);
  }
}

TEST(Client, RequestShape) {
  MockLlmServer server([](const std::string&) { return MockLlmServer::Reply{200, "Neutral"}; });
  TempDir dir("llm_req");
  Completion c = chat_completion(endpoint(server, dir / "cache.jsonl"), "hello");
  ASSERT_EQ(c.status, Completion::Status::kOk) << c.detail;
  EXPECT_EQ(c.content, "Neutral");
  auto body = server.last_body();
  EXPECT_EQ(body["model"], "mock-model");
  EXPECT_EQ(body["temperature"], 0);
  ASSERT_EQ(body["messages"].size(), 1u);
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], "hello");
}

TEST(Eval, AllSadness) {
  MockLlmServer server([](const std::string&) { return MockLlmServer::Reply{200, "Sadness"}; });
  TempDir dir("llm_sad");
  auto r = run_llm_eval(endpoint(server, dir / "cache.jsonl"), model::Task::kCategorical, items(9));
  ASSERT_EQ(r.predictions.items.size(), 9u);
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_EQ(r.predictions.items[i].id, "utt" + std::to_string(i));
    EXPECT_EQ(r.predictions.items[i].emotion, Emotion::kSadness);
  }
  EXPECT_EQ(r.network_calls, 9u);
  EXPECT_EQ(server.requests(), 9u);
}

TEST(Eval, CachedReplayIsBitIdenticalWithoutNetwork) {
  TempDir dir("llm_cache");
  auto list = items(12);
  LlmRunResult first;
  std::string url;
  {
    MockLlmServer server([](const std::string& prompt) {
      std::size_t h = std::hash<std::string>{}(prompt);
      return MockLlmServer::Reply{200, "[" + std::to_string(1 + h % 6) + ".5, 2.25, " + std::to_string(h % 9) + "]"};
    });
    first = run_llm_eval(endpoint(server, dir / "cache.jsonl"), model::Task::kAttributes, list);
    url = server.base_url();
    EXPECT_EQ(server.requests(), 12u);
  }
  LlmEndpointConfig offline;
  offline.base_url = url;
  offline.model = "mock-model";
  offline.timeout_seconds = 0.5;
  offline.max_retries = 0;
  offline.cache_path = dir / "cache.jsonl";
  auto replay = run_llm_eval(offline, model::Task::kAttributes, list);
  EXPECT_EQ(replay.network_calls, 0u);
  EXPECT_EQ(replay.cache_hits, 12u);
  EXPECT_EQ(replay.predictions, first.predictions);
  EXPECT_EQ(dataio::format_predictions(replay.predictions), dataio::format_predictions(first.predictions));
}

TEST(Eval, FailuresReported) {
  MockLlmServer server([](const std::string& prompt) {
    if (prompt.find("number 1") != std::string::npos) return MockLlmServer::Reply{404, ""};
    if (prompt.find("number 2") != std::string::npos) return MockLlmServer::Reply{200, "quite calm overall"};
    return MockLlmServer::Reply{200, "[4, 4, 4]"};
  });
  TempDir dir("llm_fail");
  auto r = run_llm_eval(endpoint(server, dir / "cache.jsonl"), model::Task::kAttributes, items(4));
  EXPECT_EQ(r.predictions.items.size(), 2u);
  ASSERT_EQ(r.failures.size(), 2u);
  EXPECT_EQ(r.failures[0].id, "utt1");
  EXPECT_EQ(r.failures[0].kind, "http");
  EXPECT_EQ(r.failures[0].http_status, 404);
  EXPECT_EQ(r.failures[1].kind, "parse");
  EXPECT_EQ(r.failures[1].raw, "quite calm overall");
  EXPECT_EQ(r.failure_report()["failed"], 2);
}

TEST(Eval, ServerErrorsRetried) {
  std::atomic<int> calls{0};
  MockLlmServer server([&](const std::string&) {
    return ++calls <= 1 ? MockLlmServer::Reply{503, ""} : MockLlmServer::Reply{200, "Fear"};
  });
  TempDir dir("llm_retry");
  auto cfg = endpoint(server, dir / "cache.jsonl");
  cfg.parallelism = 1;
  auto r = run_llm_eval(cfg, model::Task::kCategorical, items(1));
  ASSERT_EQ(r.predictions.items.size(), 1u);
  EXPECT_EQ(server.requests(), 2u);
}

TEST(Eval, UnreachableEndpointIsTransportFailure) {
  LlmEndpointConfig cfg;
  cfg.base_url = "http://127.0.0.1:1/v1";
  cfg.model = "m";
  cfg.timeout_seconds = 0.5;
  cfg.max_retries = 0;
  auto r = run_llm_eval(cfg, model::Task::kCategorical, items(2));
  EXPECT_TRUE(r.predictions.items.empty());
  ASSERT_EQ(r.failures.size(), 2u);
  EXPECT_EQ(r.failures[0].kind, "transport");
}

TEST(Cache, LaterLinesWin) {
  TempDir dir("llm_later");
  {
    ResponseCache c(dir / "c.jsonl");
    c.append("a", "h", "first");
    c.append("a", "h", "second");
  }
  ResponseCache again(dir / "c.jsonl");
  EXPECT_EQ(again.find("a", "h"), "second");
  EXPECT_FALSE(again.find("a", "other").has_value());
  EXPECT_EQ(again.size(), 1u);
}

TEST(Transcripts, ReadJsonl) {
  TempDir dir("llm_tr");
  {
    std::ofstream out(dir / "t.jsonl");
    out << "{\"id\": \"a\", \"transcript\": \"hi there\"}\n\n{\"id\": \"b\", \"transcript\": \"x\\ny\"}\n";
  }
  auto t = read_transcripts(dir / "t.jsonl");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[1].transcript, "x\ny");
  {
    std::ofstream out(dir / "bad.jsonl");
    out << "{\"id\": 3}\n";
  }
  EXPECT_THROW(read_transcripts(dir / "bad.jsonl"), ValidationError);
}
