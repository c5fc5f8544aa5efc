#include "didots/decode.hpp"

#include <algorithm>
#include <cmath>

#include "didots/common.hpp"

namespace didots {

namespace {

std::vector<double> log_softmax(const std::vector<double>& logits) {
  double mx = -1e300;
  for (double v : logits) mx = std::max(mx, v);
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - mx);
  double lse = mx + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

struct Beam {
  std::vector<int> tokens;
  double score = 0.0;
  bool done = false;
};

std::string beam_decode(StudentBackend& model, const std::vector<int>& src,
                        const DecodeConfig& config) {
  int beams = std::max(1, config.beams);
  std::vector<Beam> frontier{Beam{}};
  for (int step = 0; step < config.max_length; ++step) {
    std::vector<Beam> candidates;
    bool all_done = true;
    for (const Beam& beam : frontier) {
      if (beam.done) {
        candidates.push_back(beam);
        continue;
      }
      all_done = false;
      std::vector<double> lp = log_softmax(model.next_token_logits(src, beam.tokens));
      // top `beams` continuations of this beam suffice for the global top set
      std::vector<int> idx(lp.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
      std::partial_sort(idx.begin(), idx.begin() + std::min<std::size_t>(beams, idx.size()),
                        idx.end(), [&](int a, int b) {
                          if (lp[static_cast<std::size_t>(a)] != lp[static_cast<std::size_t>(b)])
                            return lp[static_cast<std::size_t>(a)] > lp[static_cast<std::size_t>(b)];
                          return a < b;
                        });
      for (int k = 0; k < beams && k < static_cast<int>(idx.size()); ++k) {
        Beam next = beam;
        int token = idx[static_cast<std::size_t>(k)];
        next.score += lp[static_cast<std::size_t>(token)];
        if (token == WordTokenizer::kEos) {
          next.done = true;
        } else {
          next.tokens.push_back(token);
        }
        candidates.push_back(std::move(next));
      }
    }
    if (all_done) break;
    std::stable_sort(candidates.begin(), candidates.end(), [](const Beam& a, const Beam& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.tokens < b.tokens;
    });
    if (static_cast<int>(candidates.size()) > beams) candidates.resize(static_cast<std::size_t>(beams));
    frontier = std::move(candidates);
    if (std::all_of(frontier.begin(), frontier.end(), [](const Beam& b) { return b.done; })) {
      break;
    }
  }
  const Beam* best = &frontier.front();
  for (const Beam& b : frontier) {
    if (b.score > best->score) best = &b;
  }
  return model.tokenizer().decode(best->tokens);
}

}  // namespace

SampleTrace sample_trace(StudentBackend& model, const std::string& text,
                         const DecodeConfig& config, Rng& rng) {
  if (config.temperature <= 0.0) {
    throw Error(ErrorCode::CONFIG_INVALID, "SAMPLE mode needs temperature > 0");
  }
  std::vector<int> src = model.tokenizer().encode(text);
  src.push_back(WordTokenizer::kEos);

  SampleTrace trace;
  for (int step = 0; step < config.max_length; ++step) {
    std::vector<double> logits = model.next_token_logits(src, trace.token_ids);
    double mx = -1e300;
    for (double& v : logits) {
      v /= config.temperature;
      mx = std::max(mx, v);
    }
    double sum = 0.0;
    std::vector<double> probs(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
      probs[i] = std::exp(logits[i] - mx);
      sum += probs[i];
    }
    double entropy = 0.0;
    for (double& p : probs) {
      p /= sum;
      if (p > 0.0) entropy -= p * std::log(p);
    }
    trace.step_entropies.push_back(entropy);

    double u = rng.next_double();
    int token = static_cast<int>(probs.size()) - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) {
        token = static_cast<int>(i);
        break;
      }
    }
    if (token == WordTokenizer::kEos) break;
    trace.token_ids.push_back(token);
  }
  trace.text = model.tokenizer().decode(trace.token_ids);
  return trace;
}

std::string decode(StudentBackend& model, const std::string& text,
                   const DecodeConfig& config) {
  if (text.empty()) throw Error(ErrorCode::CONFIG_INVALID, "decode needs non-empty text");
  if (config.mode == DecodeMode::BEAM) {
    if (config.beams < 1) throw Error(ErrorCode::CONFIG_INVALID, "BEAM needs beams >= 1");
    std::vector<int> src = model.tokenizer().encode(text);
    src.push_back(WordTokenizer::kEos);
    return beam_decode(model, src, config);
  }
  Rng rng(config.seed);
  return sample_trace(model, text, config, rng).text;
}

}  // namespace didots
