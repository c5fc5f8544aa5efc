#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "didots/common.hpp"
#include "didots/llm_client.hpp"
#include "didots/prompting.hpp"

using namespace didots;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Local test server with scripted failure behavior.
class FaultServer {
 public:
  explicit FaultServer(int fail_first_n, int fail_status = 500)
      : fail_first_n_(fail_first_n), fail_status_(fail_status) {
    server_.Post("/api/generate", [this](const httplib::Request& req, httplib::Response& res) {
      int n = ++hits_;
      if (n <= fail_first_n_) {
        res.status = fail_status_;
        res.set_content("{\"error\":\"scripted failure\"}", "application/json");
        return;
      }
      json body = json::parse(req.body);
      json reply;
      if (mode_ == "no-text") {
        reply["unexpected"] = "field";
      } else {
        reply["response"] = "Rewritten: " + body["model"].get<std::string>();
      }
      res.set_content(reply.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this]() { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~FaultServer() {
    server_.stop();
    thread_.join();
  }

  void set_mode(const std::string& mode) { mode_ = mode; }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int hits() const { return hits_.load(); }

 private:
  httplib::Server server_;
  std::thread thread_;
  std::atomic<int> hits_{0};
  int fail_first_n_;
  int fail_status_;
  std::string mode_ = "ok";
  int port_ = 0;
};

std::size_t line_count(const std::string& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ++n;
  }
  return n;
}

GenerationRequest request_of(const std::string& prompt) {
  GenerationRequest r;
  r.model_id = "test-model";
  r.prompt = prompt;
  return r;
}

}  // namespace

TEST_CASE("mock:ok echoes a prompt-hash acknowledgement") {
  LlmClient client("mock:ok");
  RawCompletion c = client.generate(request_of("hello"), "s1");
  CHECK(c.text.rfind("OK:", 0) == 0);
  CHECK(c.attempt == 1);
}

TEST_CASE("the default mock backend is the deterministic rewriter") {
  LlmClient client("mock:");
  TranscriptSample s;
  s.id = "x";
  s.text = "uh the boy takes takes something.";
  RenderedPrompt p = render(builtin_template(Strategy::KB), s);
  RawCompletion a = client.generate(request_of(p.text), "x");
  RawCompletion b = client.generate(request_of(p.text), "x");
  CHECK(a.text == b.text);
  CHECK(a.text == "the boy takes a plate.");
}

TEST_CASE("two 500s then success yields attempt 3") {
  FaultServer server(2);
  RetryPolicy policy;
  policy.max_attempts = 5;
  policy.initial_backoff_ms = 1;
  LlmClient client(server.endpoint(), policy);
  RawCompletion c = client.generate(request_of("ping"), "s2");
  CHECK(c.attempt == 3);
  CHECK(c.text == "Rewritten: test-model");
}

TEST_CASE("replies without a text field are BAD_RESPONSE") {
  FaultServer server(0);
  server.set_mode("no-text");
  LlmClient client(server.endpoint());
  try {
    client.generate(request_of("ping"), "s3");
    FAIL("expected BAD_RESPONSE");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BAD_RESPONSE);
  }
}

TEST_CASE("exhausted retries raise ENDPOINT_UNREACHABLE") {
  RetryPolicy policy;
  policy.max_attempts = 2;
  policy.initial_backoff_ms = 1;
  policy.timeout_ms = 200;
  LlmClient client("http://127.0.0.1:1", policy);  // nothing listens there
  try {
    client.generate(request_of("ping"), "s4");
    FAIL("expected ENDPOINT_UNREACHABLE");
  } catch (const Error& e) {
    bool transport_error = e.code() == ErrorCode::ENDPOINT_UNREACHABLE ||
                           e.code() == ErrorCode::TIMEOUT;
    CHECK(transport_error);
  }
}

TEST_CASE("audit log lines equal issued requests including retries") {
  FaultServer server(2);
  RetryPolicy policy;
  policy.max_attempts = 5;
  policy.initial_backoff_ms = 1;
  LlmClient client(server.endpoint(), policy);
  std::string audit =
      (fs::temp_directory_path() / "didots_audit_test.jsonl").string();
  fs::remove(audit);
  client.set_audit_log(audit);
  client.generate(request_of("ping"), "s5");   // 3 attempts
  client.generate(request_of("pong"), "s6");   // 1 attempt
  CHECK(client.issued_requests() == 4);
  CHECK(line_count(audit) == 4);
}

TEST_CASE("invalid request parameters are rejected before any I/O") {
  LlmClient client("mock:");
  GenerationRequest r = request_of("x");
  r.max_tokens = 0;
  CHECK_THROWS_AS(client.generate(r, "s7"), Error);
  r.max_tokens = 16;
  r.temperature = -0.5;
  CHECK_THROWS_AS(client.generate(r, "s8"), Error);
}
