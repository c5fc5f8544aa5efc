#include <doctest.h>

#include <cmath>
#include <map>

#include "didots/common.hpp"
#include "didots/metrics.hpp"
#include "didots/synthesis.hpp"
#include "didots/text.hpp"

using namespace didots;

// ---------------------------------------------------------------------------
// Brute-force edit-script oracle: enumerates every alignment, keeps the
// (min cost, then max matches) optimum, and counts operations directly.

namespace {

struct OracleCounts {
  std::size_t cost = 0, matches = 0, subs = 0, ins = 0, dels = 0;
};

void enumerate_scripts(const std::vector<std::string>& src,
                       const std::vector<std::string>& hyp, std::size_t i, std::size_t j,
                       OracleCounts acc, OracleCounts& best, bool& found) {
  if (i == src.size() && j == hyp.size()) {
    bool better = !found || acc.cost < best.cost ||
                  (acc.cost == best.cost && acc.matches > best.matches);
    if (better) best = acc;
    found = true;
    return;
  }
  if (i < src.size() && j < hyp.size()) {
    OracleCounts diag = acc;
    if (src[i] == hyp[j]) {
      ++diag.matches;
    } else {
      ++diag.cost;
      ++diag.subs;
    }
    enumerate_scripts(src, hyp, i + 1, j + 1, diag, best, found);
  }
  if (i < src.size()) {
    OracleCounts del = acc;
    ++del.cost;
    ++del.dels;
    enumerate_scripts(src, hyp, i + 1, j, del, best, found);
  }
  if (j < hyp.size()) {
    OracleCounts ins = acc;
    ++ins.cost;
    ++ins.ins;
    enumerate_scripts(src, hyp, i, j + 1, ins, best, found);
  }
}

OracleCounts edit_oracle(const std::string& source, const std::string& hypothesis) {
  std::vector<std::string> src = word_tokens(source);
  std::vector<std::string> hyp = word_tokens(hypothesis);
  OracleCounts best;
  bool found = false;
  enumerate_scripts(src, hyp, 0, 0, OracleCounts{}, best, found);
  return best;
}

std::string random_sentence(Rng& rng, std::size_t max_len) {
  static const std::vector<std::string> kWords = {"a", "b", "c", "d", "e", "f"};
  std::size_t n = rng.next_below(max_len + 1);
  std::vector<std::string> toks;
  for (std::size_t i = 0; i < n; ++i) {
    toks.push_back(kWords[rng.next_below(kWords.size())]);
  }
  return join(toks, " ");
}

// Minimal language model with explicit per-position probabilities.
class ScriptedLm : public LanguageModel {
 public:
  explicit ScriptedLm(std::vector<double> probs) : probs_(std::move(probs)) {}
  double log_prob(const std::vector<std::string>& prefix,
                  const std::string&) const override {
    double p = probs_[prefix.size() % probs_.size()];
    return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
  }

 private:
  std::vector<double> probs_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Semantic similarity

TEST_CASE("identical sentences score exactly 1 under the fallback scorer") {
  std::string s = "the boy takes a cookie from the jar";
  CHECK(semantic_similarity(bag_embedding_similarity, s, s) == 1.0);
}

TEST_CASE("disjoint content words score near zero") {
  double v = semantic_similarity(bag_embedding_similarity,
                                 "the boy takes a cookie",
                                 "quantum flux misaligned badly yesterday");
  CHECK(v <= 0.2);
}

TEST_CASE("the fallback scorer is symmetric") {
  Rng rng(31);
  const std::vector<std::string> bank = {"boy", "cookie", "water", "jar", "runs",
                                         "window", "mother", "dishes"};
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::string> aw, bw;
    for (std::size_t i = 0; i < 2 + rng.next_below(5); ++i) {
      aw.push_back(bank[rng.next_below(bank.size())]);
    }
    for (std::size_t i = 0; i < 2 + rng.next_below(5); ++i) {
      bw.push_back(bank[rng.next_below(bank.size())]);
    }
    std::string a = join(aw, " "), b = join(bw, " ");
    CHECK(bag_embedding_similarity(a, b) ==
          doctest::Approx(bag_embedding_similarity(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("a scorer returning NaN fails the contract") {
  SemanticScorer bad = [](const std::string&, const std::string&) {
    return std::numeric_limits<double>::quiet_NaN();
  };
  CHECK_THROWS_AS(semantic_similarity(bad, "a b", "c d"), Error);
}

// ---------------------------------------------------------------------------
// METEOR

TEST_CASE("meteor is zero without overlapping unigrams") {
  CHECK(meteor("the boy takes a cookie", "zebra quantum flux") == 0.0);
}

TEST_CASE("meteor of identical five-word sentences matches the closed form") {
  // m=5, P=R=1, F=1, penalty = 0.5 * (1/5)^3 -> 0.996
  double v = meteor("the boy takes a cookie", "the boy takes a cookie");
  CHECK(std::fabs(v - 0.996) <= 1e-9);
}

TEST_CASE("reversing word order scores strictly below identity") {
  std::string ref = "alpha beta gamma delta epsilon";
  std::string rev = "epsilon delta gamma beta alpha";
  CHECK(meteor(ref, rev) < meteor(ref, ref));
  CHECK(meteor(ref, rev) > 0.0);
}

TEST_CASE("stem stage matches inflected forms") {
  double inflected = meteor("the boy takes the cookies", "the boy take the cookie");
  double none = meteor("the boy takes the cookies", "the girl gave some bread");
  CHECK(inflected > 0.5);
  CHECK(none < inflected);
  CHECK(stem_word("taking") == "take");
  CHECK(stem_word("washes") == "wash");
  CHECK(stem_word("hopped") == "hop");
  CHECK(stem_word("cookies") == "cookie");
}

// ---------------------------------------------------------------------------
// Edit operations

TEST_CASE("edit_ops spec examples") {
  EditOps same = edit_ops("the boy runs", "the boy runs");
  CHECK(same.pct_sub == 0.0);
  CHECK(same.pct_add == 0.0);
  CHECK(same.pct_del == 0.0);

  EditOps mixed = edit_ops("the cat sat", "the dog sat quickly");
  CHECK(mixed.substitutions == 1);
  CHECK(mixed.insertions == 1);
  CHECK(mixed.deletions == 0);
  CHECK(mixed.pct_sub == doctest::Approx(1.0 / 3.0));
  CHECK(mixed.pct_add == doctest::Approx(1.0 / 3.0));
  CHECK(mixed.pct_del == 0.0);

  EditOps dels = edit_ops("a b c d", "a d");
  CHECK(dels.substitutions == 0);
  CHECK(dels.insertions == 0);
  CHECK(dels.deletions == 2);
  CHECK(dels.pct_del == doctest::Approx(0.5));
}

TEST_CASE("edit_ops equals the brute-force oracle on 200 random pairs") {
  Rng rng(20240901);
  for (int trial = 0; trial < 200; ++trial) {
    std::string a = random_sentence(rng, 8);
    std::string b = random_sentence(rng, 8);
    OracleCounts oracle = edit_oracle(a, b);
    EditOps got = edit_ops(a, b);
    CAPTURE(a);
    CAPTURE(b);
    CHECK(got.matches == oracle.matches);
    CHECK(got.substitutions == oracle.subs);
    CHECK(got.insertions == oracle.ins);
    CHECK(got.deletions == oracle.dels);
  }
}

TEST_CASE("edit fractions are capped at one") {
  EditOps ops = edit_ops("a", "x y z w v u");
  CHECK(ops.pct_add == 1.0);
}

// ---------------------------------------------------------------------------
// Lexical similarity

TEST_CASE("lexical similarity spec examples") {
  CHECK(lexical_similarity("the boy runs", "the boy runs") == 1.0);
  CHECK(lexical_similarity("aa bb cc", "xx yy zz") == 0.0);
  CHECK(lexical_similarity("the boy runs", "the girl runs") ==
        doctest::Approx(1.0 - 1.0 / 3.0));
}

TEST_CASE("lexical similarity is symmetric and 1 iff unique lists match") {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    std::string a = random_sentence(rng, 6);
    std::string b = random_sentence(rng, 6);
    if (word_tokens(a).empty() || word_tokens(b).empty()) continue;
    CHECK(lexical_similarity(a, b) == doctest::Approx(lexical_similarity(b, a)));
  }
  CHECK(lexical_similarity("a b a b", "a b") == 1.0);  // same unique lists
}

// ---------------------------------------------------------------------------
// Perplexity

TEST_CASE("uniform LM perplexity equals the vocabulary size exactly") {
  for (std::size_t v : {2, 3, 5, 10, 977}) {
    UniformLm lm(v);
    CHECK(perplexity(lm, "the boy takes a cookie") == static_cast<double>(v));
    CHECK(perplexity(lm, "one two three four five six seven") == static_cast<double>(v));
  }
}

TEST_CASE("an LM certain of every token gives perplexity 1") {
  ScriptedLm lm({1.0});
  CHECK(perplexity(lm, "anything goes here") == 1.0);
}

TEST_CASE("hand-built three-token model matches the closed form") {
  // probs (0.5, 0.25, 0.5) -> exp(-(ln .5 + ln .25 + ln .5)/3) = 2^(4/3)
  ScriptedLm lm({0.5, 0.25, 0.5});
  double expected = std::pow(2.0, 4.0 / 3.0);
  CHECK(std::fabs(perplexity(lm, "a b c") - expected) <= 1e-9);
}

TEST_CASE("zero-probability tokens raise ZERO_PROBABILITY") {
  ScriptedLm lm({0.5, 0.0});
  try {
    perplexity(lm, "a b c");
    FAIL("expected ZERO_PROBABILITY");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZERO_PROBABILITY);
  }
}

TEST_CASE("bigram LM fits and stays above 1") {
  BigramLm lm({"the boy takes a cookie", "the girl takes a plate"});
  double ppl = perplexity(lm, "the boy takes a plate");
  CHECK(ppl >= 1.0);
  CHECK(std::isfinite(ppl));
}

// ---------------------------------------------------------------------------
// Formality

TEST_CASE("formality fallback spec examples") {
  CHECK(formality(heuristic_formality, "well uh it's kinda like that") <= 0.4);
  CHECK(formality(heuristic_formality, "The mother is washing dishes.") >= 0.8);
}

TEST_CASE("formality scorer contract is validated") {
  TextScorer bad = [](const std::string&) { return 1.5; };
  try {
    formality(bad, "anything");
    FAIL("expected SCORER_FAILURE");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SCORER_FAILURE);
  }
}

// ---------------------------------------------------------------------------
// Quality report

namespace {

PairDataset dataset_of(const std::vector<std::pair<std::string, std::string>>& items) {
  PairDataset d;
  int i = 0;
  for (const auto& [orig, obf] : items) {
    ObfuscationPair p;
    p.original.id = "p" + std::to_string(i++);
    p.original.text = orig;
    p.obfuscated = obf;
    d.pairs.push_back(p);
  }
  d.recompute_stats();
  return d;
}

}  // namespace

TEST_CASE("identity dataset maxes the similarity columns") {
  PairDataset d = dataset_of({{"the boy takes a cookie", "the boy takes a cookie"},
                              {"the water runs over", "the water runs over"}});
  QualityReport r = quality_report(d, ScorerRegistry{});
  CHECK(r.semantics.mean == 1.0);
  CHECK(r.pct_sub.mean == 0.0);
  CHECK(r.pct_add.mean == 0.0);
  CHECK(r.pct_del.mean == 0.0);
  CHECK(r.simi_lex.mean == 1.0);
  CHECK(r.pairs_scored == 2);
}

TEST_CASE("report column set matches the quality table") {
  PairDataset d = dataset_of({{"the boy takes a cookie", "the boy takes a biscuit"}});
  QualityReport r = quality_report(d, ScorerRegistry{});
  std::string json = quality_report_to_json(r);
  for (const char* col :
       {"\"S\"", "\"Formality\"", "\"METEOR\"", "\"%SUB\"", "\"%ADD\"", "\"%DEL\"",
        "\"Simi_Lex\"", "\"Perplexity\""}) {
    CAPTURE(col);
    CHECK(json.find(col) != std::string::npos);
  }
}

TEST_CASE("means aggregate per-pair values") {
  PairDataset d = dataset_of({{"aa bb cc", "aa bb cc"},      // simi_lex 1.0
                              {"aa bb cc dd", "aa bb xx dd"}});  // one sub among 4 unique
  QualityReport r = quality_report(d, ScorerRegistry{});
  CHECK(r.simi_lex.mean == doctest::Approx((1.0 + 0.75) / 2.0));
}

TEST_CASE("flagged pairs are excluded from scoring") {
  PairDataset d = dataset_of({{"the boy takes a cookie", "the boy takes a cookie"},
                              {"the water runs over", ""}});
  d.pairs[1].flags.insert(PairFlag::EMPTY);
  d.recompute_stats();
  QualityReport r = quality_report(d, ScorerRegistry{});
  CHECK(r.pairs_scored == 1);
  CHECK(r.pairs_excluded == 1);
}

TEST_CASE("report fields stay in range on random noisy sentences") {
  Rng rng(4242);
  std::vector<std::pair<std::string, std::string>> items;
  auto noisy = [&]() {
    std::vector<std::string> toks;
    std::size_t n = 1 + rng.next_below(10);
    for (std::size_t i = 0; i < n; ++i) {
      std::string w;
      std::size_t len = 1 + rng.next_below(8);
      for (std::size_t j = 0; j < len; ++j) {
        w.push_back(static_cast<char>('a' + rng.next_below(26)));
      }
      if (rng.next_double() < 0.2) w += "'s";
      toks.push_back(w);
    }
    return join(toks, " ");
  };
  for (int i = 0; i < 30; ++i) items.push_back({noisy(), noisy()});
  QualityReport r = quality_report(dataset_of(items), ScorerRegistry{});
  for (const MeanStd* field : {&r.semantics, &r.formality, &r.meteor, &r.pct_sub,
                               &r.pct_add, &r.pct_del, &r.simi_lex}) {
    CHECK(field->mean >= 0.0);
    CHECK(field->mean <= 1.0);
  }
  CHECK(r.perplexity.mean >= 1.0);
}

// ---------------------------------------------------------------------------
// F1

TEST_CASE("f1 matches the confusion-matrix formula") {
  // TP=2, FP=1, FN=1 -> 2*2 / (2*2 + 1 + 1)
  std::vector<bool> pred{true, true, true, false, false};
  std::vector<bool> truth{true, true, false, true, false};
  CHECK(f1_score(pred, truth) == doctest::Approx(2.0 * 2 / (2.0 * 2 + 1 + 1)));
}

TEST_CASE("f1 equals the exhaustive oracle on 1000 random vectors") {
  Rng rng(555);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t n = 1 + rng.next_below(40);
    std::vector<bool> pred(n), truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = rng.next_double() < 0.5;
      truth[i] = rng.next_double() < 0.5;
    }
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pred[i] && truth[i]) ++tp;
      if (pred[i] && !truth[i]) ++fp;
      if (!pred[i] && truth[i]) ++fn;
    }
    double expected = (2 * tp + fp + fn) == 0
                          ? 0.0
                          : 2.0 * static_cast<double>(tp) /
                                static_cast<double>(2 * tp + fp + fn);
    CHECK(f1_score(pred, truth) == doctest::Approx(expected).epsilon(1e-12));
  }
}
