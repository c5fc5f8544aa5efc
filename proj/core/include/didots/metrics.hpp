#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace didots {

struct PairDataset;  // synthesis.hpp

// ---------------------------------------------------------------------------
// Semantic similarity

// Callable scoring meaning preservation in [0, 1]; 1 means identical meaning
// under the scorer.
using SemanticScorer = std::function<double(const std::string&, const std::string&)>;

// Deterministic offline fallback: cosine between mean bags of pseudo-random
// unit word vectors (content words only). Equal bags score exactly 1.
double bag_embedding_similarity(const std::string& a, const std::string& b);

// Applies `scorer` and validates its contract (finite, within [0,1]).
// Throws SCORER_FAILURE otherwise.
double semantic_similarity(const SemanticScorer& scorer, const std::string& a,
                           const std::string& b);

// ---------------------------------------------------------------------------
// METEOR

// Unigram alignment in two stages (exact, then stem), recall-weighted
// harmonic mean, chunk fragmentation penalty. The synonym stage is omitted;
// only exact and stem matching run.
double meteor(const std::string& reference, const std::string& hypothesis);

// Mini-stemmer backing the METEOR stem stage (plural/-ed/-ing stripping with
// doubling and CVC repair).
std::string stem_word(const std::string& word);

// ---------------------------------------------------------------------------
// Word-level edit operations

struct EditOps {
  std::size_t matches = 0;
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  // Counts normalized by source word count, capped at 1.
  double pct_sub = 0.0;
  double pct_add = 0.0;
  double pct_del = 0.0;
};

// Minimum-cost word alignment under unit costs; among minimal-cost scripts
// the one with the most matches is canonical (which fixes the SUB/ADD/DEL
// counts uniquely).
EditOps edit_ops(const std::string& source, const std::string& hypothesis);

// ---------------------------------------------------------------------------
// Lexical similarity

// Unique words of each side in first-occurrence order; word-level edit
// distance D between the two lists; 1 - D / max(|A|, |B|).
double lexical_similarity(const std::string& a, const std::string& b);

// ---------------------------------------------------------------------------
// Perplexity

class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual std::vector<std::string> lm_tokens(const std::string& text) const;

  // log p(token | prefix); -inf means zero probability.
  virtual double log_prob(const std::vector<std::string>& prefix,
                          const std::string& token) const = 0;

  // exp(-(1/N) * sum log p(token_i | prefix)). Models with a closed form may
  // override so the identity stays exact in floating point.
  virtual double perplexity(const std::string& text) const;
};

// Throws ZERO_PROBABILITY if any token has p = 0 under the model.
double perplexity(const LanguageModel& lm, const std::string& text);

// Uniform distribution over a fixed vocabulary size; perplexity is exactly
// the vocabulary size for any text.
class UniformLm : public LanguageModel {
 public:
  explicit UniformLm(std::size_t vocab_size);
  double log_prob(const std::vector<std::string>& prefix,
                  const std::string& token) const override;
  double perplexity(const std::string& text) const override;

 private:
  std::size_t vocab_size_;
};

// Add-k smoothed bigram model fitted on a reference text collection; the
// offline stand-in for a pretrained causal LM.
class BigramLm : public LanguageModel {
 public:
  BigramLm(const std::vector<std::string>& texts, double smoothing = 0.1);
  double log_prob(const std::vector<std::string>& prefix,
                  const std::string& token) const override;

 private:
  std::map<std::string, std::map<std::string, std::size_t>> bigram_;
  std::map<std::string, std::size_t> unigram_;
  std::size_t vocab_size_ = 0;
  double smoothing_;
};

// ---------------------------------------------------------------------------
// Formality

using TextScorer = std::function<double(const std::string&)>;

// Heuristic fallback: 1 minus a clipped weighted rate of fillers (w=0.8),
// contractions (w=0.6) and a lowercase sentence start (w=0.2).
double heuristic_formality(const std::string& text);

// Applies `scorer` with contract validation. Throws SCORER_FAILURE.
double formality(const TextScorer& scorer, const std::string& text);

// ---------------------------------------------------------------------------
// Dataset-level quality report

struct ScorerRegistry {
  SemanticScorer semantic = bag_embedding_similarity;
  std::string semantic_name = "bag-embedding-cosine";
  TextScorer formality = heuristic_formality;
  std::string formality_name = "heuristic-formality";
  std::shared_ptr<LanguageModel> lm;  // defaults to a BigramLm over the originals
  std::string lm_name = "bigram-lm";
};

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

struct QualityReport {
  MeanStd semantics;
  MeanStd formality;
  MeanStd meteor;
  MeanStd pct_sub;
  MeanStd pct_add;
  MeanStd pct_del;
  MeanStd simi_lex;
  MeanStd perplexity;
  std::size_t pairs_scored = 0;
  std::size_t pairs_excluded = 0;
  std::map<std::string, std::string> scorer_names;  // column -> scorer
};

// Per-pair metrics averaged over flag-free pairs. Column set mirrors
// {S, Formality, METEOR, %SUB, %ADD, %DEL, Simi_Lex, Perplexity}.
QualityReport quality_report(const PairDataset& pairs, const ScorerRegistry& scorers);

std::string quality_report_to_json(const QualityReport& report);

// ---------------------------------------------------------------------------
// Classification score

// F1 of the positive class from aligned boolean vectors.
double f1_score(const std::vector<bool>& predicted, const std::vector<bool>& truth);

}  // namespace didots
