#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "didots/backend.hpp"

namespace didots {

enum class DecodeMode { BEAM, SAMPLE };

struct DecodeConfig {
  DecodeMode mode = DecodeMode::BEAM;
  int beams = 4;         // BEAM mode, >= 1
  int max_length = 256;  // generated tokens
  double temperature = 1.0;  // SAMPLE mode, > 0
  std::uint64_t seed = 0;    // SAMPLE mode
};

// BEAM is deterministic given model and text; SAMPLE divides logits by the
// temperature before normalization. Output truncates at max_length.
std::string decode(StudentBackend& model, const std::string& text,
                   const DecodeConfig& config);

struct SampleTrace {
  std::vector<int> token_ids;
  // Shannon entropy (nats) of each step's sampling distribution.
  std::vector<double> step_entropies;
  std::string text;
};

// One sampled trajectory with per-step distribution entropies; the DP
// baseline measurement hook.
SampleTrace sample_trace(StudentBackend& model, const std::string& text,
                         const DecodeConfig& config, Rng& rng);

}  // namespace didots
