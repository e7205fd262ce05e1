#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace serlab::testing {

// Minimal chat-completions endpoint on a loopback port. `reply` maps the
// prompt to a response; a non-200 status makes the server answer with that
// status and an error body.
class MockLlmServer {
 public:
  struct Reply {
    int status = 200;
    std::string content;
  };
  using Handler = std::function<Reply(const std::string& prompt)>;

  explicit MockLlmServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      nlohmann::json body = nlohmann::json::parse(req.body);
      {
        std::lock_guard<std::mutex> lock(mu_);
        last_body_ = body;
      }
      Reply r = handler_(body["messages"][0]["content"].get<std::string>());
      res.status = r.status;
      if (r.status != 200) {
        res.set_content("{\"error\":\"mock\"}", "application/json");
        return;
      }
      nlohmann::json out = {{"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", r.content}}}}}}};
      res.set_content(out.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockLlmServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }
  MockLlmServer(const MockLlmServer&) = delete;
  MockLlmServer& operator=(const MockLlmServer&) = delete;

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  std::size_t requests() const { return requests_.load(); }
  nlohmann::json last_body() const {
    std::lock_guard<std::mutex> lock(mu_);
    return last_body_;
  }

 private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<std::size_t> requests_{0};
  mutable std::mutex mu_;
  nlohmann::json last_body_;
};

}  // namespace serlab::testing
