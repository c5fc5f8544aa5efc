#include "didots/llm_client.hpp"

#include <chrono>
#include <fstream>
#include <set>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "didots/common.hpp"
#include "didots/prompting.hpp"
#include "didots/sha256.hpp"
#include "didots/text.hpp"

namespace didots {

using nlohmann::json;

namespace {

const std::set<std::string>& mock_fillers() {
  static const std::set<std::string> kFillers = {"uh", "um", "er", "ah", "hm", "hmm"};
  return kFillers;
}

// Generic-noun phrases the mock teacher resolves to concrete ones.
const std::vector<std::pair<std::string, std::string>>& mock_substitutions() {
  static const std::vector<std::pair<std::string, std::string>> kSubs = {
      {"something", "a plate"},
      {"thing", "plate"},
      {"stuff", "dishes"},
      {"anything", "a plate"},
  };
  return kSubs;
}

std::string strip_terminal(const std::string& tok, char* punct) {
  if (!tok.empty() && (tok.back() == '.' || tok.back() == '?' || tok.back() == '!' ||
                       tok.back() == ',')) {
    *punct = tok.back();
    return tok.substr(0, tok.size() - 1);
  }
  *punct = '\0';
  return tok;
}

}  // namespace

std::string mock_teacher_rewrite(const std::string& sentence) {
  std::vector<std::string> out;
  std::string prev_core;
  for (const auto& tok : tokenize(sentence)) {
    char punct = '\0';
    std::string core = strip_terminal(tok, &punct);
    std::string low = to_lower(core);
    if (mock_fillers().count(low)) {
      // keep the sentence punctuation if the filler carried it
      if (punct != '\0' && !out.empty() && out.back().find_last_of(".?!,") == std::string::npos) {
        out.back().push_back(punct);
      }
      continue;
    }
    if (!prev_core.empty() && low == prev_core) continue;  // immediate repetition
    std::string mapped = core;
    for (const auto& [from, to] : mock_substitutions()) {
      if (low == from) {
        mapped = to;
        break;
      }
    }
    if (punct != '\0') mapped.push_back(punct);
    out.push_back(mapped);
    prev_core = low;
  }
  std::string text = join(out, " ");
  if (!text.empty() && text.find_last_of(".?!") != text.size() - 1) text += ".";
  return text;
}

LlmClient::LlmClient(std::string endpoint, RetryPolicy policy)
    : endpoint_(std::move(endpoint)), policy_(policy) {
  if (endpoint_.rfind("mock", 0) == 0) {
    mock_ = true;
    std::size_t colon = endpoint_.find(':');
    mock_mode_ = colon == std::string::npos ? "" : endpoint_.substr(colon + 1);
    while (!mock_mode_.empty() && mock_mode_.front() == '/') mock_mode_.erase(0, 1);
    if (mock_mode_.rfind("refuse_every=", 0) == 0) {
      refuse_every_ = std::stoul(mock_mode_.substr(std::string("refuse_every=").size()));
      mock_mode_ = "refuse_every";
    }
  }
}

void LlmClient::set_audit_log(const std::string& path) {
  std::lock_guard<std::mutex> lock(mu_);
  audit_path_ = path;
}

std::size_t LlmClient::issued_requests() const {
  std::lock_guard<std::mutex> lock(mu_);
  return issued_;
}

void LlmClient::audit(const std::string& sentence_id, int attempt,
                      const std::string& status, int http_status, double latency_ms,
                      const std::string& prompt, const std::string& text) {
  std::lock_guard<std::mutex> lock(mu_);
  ++issued_;
  if (audit_path_.empty()) return;
  json line;
  line["sentence_id"] = sentence_id;
  line["attempt"] = attempt;
  line["status"] = status;
  if (http_status) line["http_status"] = http_status;
  line["latency_ms"] = latency_ms;
  line["prompt_sha256"] = sha256_hex(prompt);
  if (!text.empty()) line["text_sha256"] = sha256_hex(text);
  std::ofstream out(audit_path_, std::ios::app);
  out << line.dump() << "\n";
}

RawCompletion LlmClient::generate(const GenerationRequest& request,
                                  const std::string& sentence_id) {
  if (request.max_tokens < 1) {
    throw Error(ErrorCode::CONFIG_INVALID, "max_tokens must be >= 1");
  }
  if (request.temperature < 0.0) {
    throw Error(ErrorCode::CONFIG_INVALID, "temperature must be >= 0");
  }
  return mock_ ? generate_mock(request, sentence_id)
               : generate_http(request, sentence_id);
}

RawCompletion LlmClient::generate_mock(const GenerationRequest& request,
                                       const std::string& sentence_id) {
  std::size_t serial;
  {
    std::lock_guard<std::mutex> lock(mu_);
    serial = issued_ + 1;
  }
  RawCompletion completion;
  completion.attempt = 1;
  if (mock_mode_ == "ok") {
    completion.text = "OK: " + sha256_hex(request.prompt).substr(0, 12);
  } else if (mock_mode_ == "refuse_every" && refuse_every_ > 0 &&
             serial % refuse_every_ == 0) {
    completion.text = "I cannot create that content.";
  } else {
    std::string sentence = extract_marked_sentence(request.prompt);
    if (sentence.empty()) sentence = request.prompt;
    completion.text = mock_teacher_rewrite(sentence);
  }
  audit(sentence_id, 1, "ok", 0, 0.0, request.prompt, completion.text);
  return completion;
}

RawCompletion LlmClient::generate_http(const GenerationRequest& request,
                                       const std::string& sentence_id) {
  json body;
  body["model"] = request.model_id;
  body["prompt"] = request.prompt;
  body["stream"] = false;
  body["options"]["temperature"] = request.temperature;
  body["options"]["num_predict"] = request.max_tokens;
  if (request.seed) body["options"]["seed"] = *request.seed;
  const std::string payload = body.dump();

  int backoff_ms = policy_.initial_backoff_ms;
  std::string last_failure = "unreachable";
  for (int attempt = 1; attempt <= policy_.max_attempts; ++attempt) {
    auto started = std::chrono::steady_clock::now();
    httplib::Client client(endpoint_);
    client.set_connection_timeout(0, policy_.timeout_ms * 1000);
    client.set_read_timeout(policy_.timeout_ms / 1000, (policy_.timeout_ms % 1000) * 1000);

    httplib::Result res = client.Post("/api/generate", payload, "application/json");
    double latency =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();

    if (!res) {
      bool timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                       res.error() == httplib::Error::Read ||
                       res.error() == httplib::Error::Write;
      last_failure = timed_out ? "timeout" : "unreachable";
      audit(sentence_id, attempt, "retry:" + last_failure, 0, latency, request.prompt, "");
    } else if (res->status >= 500) {
      last_failure = "server " + std::to_string(res->status);
      audit(sentence_id, attempt, "retry:5xx", res->status, latency, request.prompt, "");
    } else if (res->status != 200) {
      audit(sentence_id, attempt, "error:http", res->status, latency, request.prompt, "");
      throw Error(ErrorCode::BAD_RESPONSE,
                  "HTTP " + std::to_string(res->status) + " from " + endpoint_);
    } else {
      json reply;
      try {
        reply = json::parse(res->body);
      } catch (const json::exception&) {
        audit(sentence_id, attempt, "error:parse", res->status, latency, request.prompt, "");
        throw Error(ErrorCode::BAD_RESPONSE, "response is not JSON");
      }
      std::string text;
      if (reply.contains("response") && reply["response"].is_string()) {
        text = reply["response"].get<std::string>();
      } else if (reply.contains("text") && reply["text"].is_string()) {
        text = reply["text"].get<std::string>();
      } else {
        audit(sentence_id, attempt, "error:no-text", res->status, latency, request.prompt, "");
        throw Error(ErrorCode::BAD_RESPONSE, "reply carries no text field");
      }
      audit(sentence_id, attempt, "ok", res->status, latency, request.prompt, text);
      RawCompletion completion;
      completion.text = text;
      completion.latency_ms = latency;
      completion.attempt = attempt;
      return completion;
    }

    if (attempt < policy_.max_attempts) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms = static_cast<int>(backoff_ms * policy_.backoff_multiplier);
    }
  }
  if (last_failure == "timeout") {
    throw Error(ErrorCode::TIMEOUT, "no reply from " + endpoint_ + " after " +
                                        std::to_string(policy_.max_attempts) + " attempts");
  }
  throw Error(ErrorCode::ENDPOINT_UNREACHABLE,
              endpoint_ + " failed after " + std::to_string(policy_.max_attempts) +
                  " attempts (" + last_failure + ")");
}

}  // namespace didots
