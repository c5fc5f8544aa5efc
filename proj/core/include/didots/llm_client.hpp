#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace didots {

struct GenerationRequest {
  std::string model_id;
  std::string prompt;
  int max_tokens = 256;       // >= 1
  double temperature = 0.7;   // >= 0
  std::optional<std::int64_t> seed;
};

struct RawCompletion {
  std::string text;
  double latency_ms = 0.0;
  int attempt = 1;
};

struct RetryPolicy {
  int max_attempts = 3;
  int initial_backoff_ms = 50;
  double backoff_multiplier = 2.0;
  int timeout_ms = 30000;
};

// Client for a locally hosted text-generation HTTP endpoint speaking the
// common generate API: POST /api/generate with
//   {model, prompt, options: {temperature, seed, num_predict}}
// and a JSON reply whose "response" (or "text") field carries the
// completion.
//
// Endpoints with a mock: scheme run offline:
//   mock:            rule-based disfluency remover (the offline teacher)
//   mock:ok          echoes "OK: <prompt sha256 prefix>"
//   mock:refuse_every=N   refuses every Nth request, cleans the rest
//
// Transient failures (connect errors, 5xx, timeouts) retry with exponential
// backoff up to policy.max_attempts. Every issued request (including
// retries) appends one line to the audit log when one is configured.
class LlmClient {
 public:
  explicit LlmClient(std::string endpoint, RetryPolicy policy = {});

  void set_audit_log(const std::string& path);

  // Throws ENDPOINT_UNREACHABLE / TIMEOUT after retries are exhausted and
  // BAD_RESPONSE when the reply has no text field.
  RawCompletion generate(const GenerationRequest& request,
                         const std::string& sentence_id = "");

  std::size_t issued_requests() const;
  bool is_mock() const { return mock_; }
  const std::string& endpoint() const { return endpoint_; }

 private:
  RawCompletion generate_mock(const GenerationRequest& request,
                              const std::string& sentence_id);
  RawCompletion generate_http(const GenerationRequest& request,
                              const std::string& sentence_id);
  void audit(const std::string& sentence_id, int attempt, const std::string& status,
             int http_status, double latency_ms, const std::string& prompt,
             const std::string& text);

  std::string endpoint_;
  RetryPolicy policy_;
  bool mock_ = false;
  std::string mock_mode_;
  std::size_t refuse_every_ = 0;

  mutable std::mutex mu_;
  std::string audit_path_;
  std::size_t issued_ = 0;
};

// The rule set behind mock: cleaning — drops fillers, collapses immediate
// repetitions, and maps generic nouns to concrete ones. Exposed so tests and
// the adaptive-adversary fixtures can call it directly as text -> text.
std::string mock_teacher_rewrite(const std::string& sentence);

}  // namespace didots
