#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "didots/corpus.hpp"
#include "didots/llm_client.hpp"
#include "didots/prompting.hpp"

namespace didots {

enum class PairFlag {
  REFUSAL,
  COPYING,
  INSTRUCTION_ECHO,
  IDEM,
  EMPTY,
  LOW_SEMANTIC,
  ERRORED,
};

const char* pair_flag_name(PairFlag f);
PairFlag parse_pair_flag(const std::string& s);

// One [original, obfuscated] training pair. An empty flag set means the
// candidate is usable for training: non-empty, free of delimiter markers and
// instruction fragments.
struct ObfuscationPair {
  TranscriptSample original;
  std::string obfuscated;
  Strategy strategy = Strategy::ZS;
  std::string model_id;
  std::set<PairFlag> flags;
};

struct PairStats {
  std::size_t total = 0;
  std::size_t clean = 0;
  std::map<PairFlag, std::size_t> flag_counts;

  double clean_fraction() const {
    return total ? static_cast<double>(clean) / static_cast<double>(total) : 0.0;
  }
  double flagged_fraction() const {
    return total ? static_cast<double>(total - clean) / static_cast<double>(total) : 0.0;
  }
};

struct PairDataset {
  std::vector<ObfuscationPair> pairs;
  PairStats stats;

  std::vector<const ObfuscationPair*> clean_pairs() const;
  void recompute_stats();
};

// Failure triage configuration. The LOW_SEMANTIC floor only applies when a
// scorer is configured.
struct FailureRules {
  double copying_threshold = 0.6;  // unigram-overlap (Jaccard) vs exemplars
  std::function<double(const std::string&, const std::string&)> semantic_scorer;
  double low_semantic_floor = 0.3;
};

// Strips echoed prompt lines, delimiter markers, leading labels
// ("Paraphrase:", "Output:", ...), surrounding quotes and whitespace.
// May return an empty string; that is flagged downstream.
std::string clean_completion(const RawCompletion& raw, const RenderedPrompt& prompt);

// Stateless triage reproducing the observable failure modes: refusals,
// instruction echoes (>= 6-token contiguous overlap with the instruction),
// exemplar copying (FS only), meta-statements ("keep it the same"), blanks,
// and optionally low semantic agreement.
std::set<PairFlag> classify_failure(const std::string& original,
                                    const std::string& candidate,
                                    const PromptTemplate& tmpl,
                                    const FailureRules& rules = {});

struct SynthesisOptions {
  std::string model_id = "mock";
  int max_tokens = 256;
  double temperature = 0.7;
  std::optional<std::int64_t> seed;
  int parallel = 1;
  FailureRules rules;
};

// One render -> generate -> clean -> classify pass per corpus sample, in id
// order. Per-sample client errors land in the ERRORED bucket; the run aborts
// only when more than half the samples error out.
PairDataset build_pairs(const Corpus& corpus, Strategy strategy, LlmClient& client,
                        const PromptTemplate& tmpl, const SynthesisOptions& options = {});

// Pairs JSONL: {id, original, obfuscated, strategy, model, flags, label, split}
std::string pairs_to_jsonl(const PairDataset& dataset);
void save_pairs(const PairDataset& dataset, const std::string& path);
PairDataset load_pairs(const std::string& path);

}  // namespace didots
