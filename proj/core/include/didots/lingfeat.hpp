#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "didots/corpus.hpp"

namespace didots {

enum class PosTag {
  INTJ, ADV, NOUN, VERB, MODAL, DET, PRON, ADP, ADJ, CONJ, NUM, OTHER,
};

const char* pos_tag_name(PosTag t);

struct TaggedToken {
  std::string token;
  PosTag tag = PosTag::OTHER;
};

// sentence -> one tag per token, deterministic.
using Tagger = std::function<std::vector<TaggedToken>(const std::string&)>;

// Deterministic rule-and-lexicon tagger covering spontaneous-speech
// vocabulary; a statistical tagger can be injected for real corpora.
Tagger rule_tagger();

// The ten dementia-marker features. Proportions are over total tagged
// tokens; ratios and the generic_* fractions are quotients of tag counts and
// are absent when their denominator is zero.
struct FeatureProfile {
  double prop_interjections = 0.0;
  double prop_adverbs = 0.0;
  double mean_syllables_per_word = 0.0;
  double prop_nouns = 0.0;
  double prop_modals = 0.0;
  double prop_verbs = 0.0;
  std::optional<double> ratio_verbs_nouns;
  std::optional<double> ratio_adverbs_nouns;
  std::optional<double> generic_nouns;   // share of nouns from the generic lexicon
  std::optional<double> generic_verbs;   // share of verbs from the generic lexicon

  // raw tallies for auditability
  std::size_t total_tokens = 0;
  std::size_t noun_count = 0;
  std::size_t verb_count = 0;
};

// Lexicons behind generic_nouns / generic_verbs; configurable at call sites
// that need different marker sets.
struct GenericLexicons {
  std::vector<std::string> nouns = {"thing", "things", "something", "anything",
                                    "everything", "stuff"};
  std::vector<std::string> verbs = {"do",   "does", "did",  "doing", "get",  "gets",
                                    "got",  "getting", "go", "goes", "went", "going",
                                    "make", "makes",   "made", "making", "have",
                                    "has",  "had",     "having"};
};

// Token-level counts aggregated corpus-wide before division. Throws
// TAGGER_FAILURE (with the offending id when known).
FeatureProfile feature_profile(const std::vector<std::string>& texts,
                               const Tagger& tagger,
                               const GenericLexicons& lexicons = {});
FeatureProfile feature_profile(const Corpus& corpus, const Tagger& tagger,
                               const GenericLexicons& lexicons = {});

enum class Direction { UP, DOWN };

struct ChangeRow {
  std::string feature;        // machine name
  std::string display;        // table row name
  Direction desired = Direction::DOWN;
  std::optional<double> pct_change;  // 100 * (obf - base) / base
  bool toward_control = false;
  std::string note;           // e.g. "zero baseline"
};

struct ChangeReport {
  std::vector<ChangeRow> rows;  // ordered as the feature table
};

// Per-feature percentage change with the desired-direction annotation.
// Zero-baseline features keep their row but carry a note instead of a value.
ChangeReport percent_change(const FeatureProfile& base, const FeatureProfile& obfuscated);

std::string feature_profile_to_json(const FeatureProfile& profile);
std::string change_report_to_json(const ChangeReport& report,
                                  const FeatureProfile& base,
                                  const FeatureProfile& obfuscated);

}  // namespace didots
