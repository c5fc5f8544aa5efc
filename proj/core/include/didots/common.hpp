#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace didots {

enum class ErrorCode {
  // corpus
  MALFORMED_RECORD,
  DUPLICATE_ID,
  UNKNOWN_LABEL,
  SPLIT_MISMATCH,
  // prompting
  MARKER_COLLISION,
  // llm client
  ENDPOINT_UNREACHABLE,
  BAD_RESPONSE,
  TIMEOUT,
  // student
  UNKNOWN_TARGET,
  RANK_TOO_LARGE,
  EMPTY_TRAINSET,
  NONFINITE_LOSS,
  UNSUPPORTED_KIND,
  NO_ADAPTER,
  // adversary
  EMPTY_VOCABULARY,
  SINGLE_CLASS_TRAINSET,
  // metrics
  SCORER_FAILURE,
  ZERO_PROBABILITY,
  // lingfeat
  TAGGER_FAILURE,
  ZERO_BASELINE,
  // pipeline
  MISSING_ARTIFACT,
  CONFIG_INVALID,
  RUN_LOCKED,
  IO_ERROR,
};

const char* error_code_name(ErrorCode code);

// All recoverable failures surface as this exception; `code()` names the
// condition and `what()` carries the diagnostic.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Deterministic random source. Wraps a 64-bit Mersenne engine but implements
// its own uniform/gaussian draws so streams are identical across standard
// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform integer in [0, n)
  std::uint64_t next_below(std::uint64_t n) {
    return n ? next_u64() % n : 0;
  }

  // standard normal via Box-Muller
  double next_gaussian();

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace didots
