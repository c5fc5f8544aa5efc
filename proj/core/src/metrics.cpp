#include "didots/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "didots/common.hpp"
#include "didots/synthesis.hpp"
#include "didots/text.hpp"

namespace didots {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Semantic similarity

namespace {

const std::set<std::string>& stopwords() {
  static const std::set<std::string> kStop = {
      "the", "a",  "an", "is", "are", "was", "were", "be",  "been", "and",
      "or",  "of", "to", "in", "on",  "at",  "it",   "its", "that", "this",
  };
  return kStop;
}

std::uint64_t word_seed(const std::string& word) {
  // FNV-1a
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : word) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

constexpr int kEmbedDim = 256;

std::vector<double> sentence_bag(const std::string& text) {
  std::vector<double> acc(kEmbedDim, 0.0);
  std::size_t n = 0;
  for (const auto& w : word_tokens(text)) {
    if (stopwords().count(w)) continue;
    Rng rng(word_seed(w));
    for (int i = 0; i < kEmbedDim; ++i) acc[i] += rng.next_gaussian();
    ++n;
  }
  if (n == 0) return {};
  for (double& v : acc) v /= static_cast<double>(n);
  return acc;
}

}  // namespace

double bag_embedding_similarity(const std::string& a, const std::string& b) {
  std::vector<std::string> wa, wb;
  for (const auto& w : word_tokens(a)) {
    if (!stopwords().count(w)) wa.push_back(w);
  }
  for (const auto& w : word_tokens(b)) {
    if (!stopwords().count(w)) wb.push_back(w);
  }
  std::sort(wa.begin(), wa.end());
  std::sort(wb.begin(), wb.end());
  if (wa == wb) return 1.0;  // equal bags: identical meaning by definition
  std::vector<double> va = sentence_bag(a), vb = sentence_bag(b);
  if (va.empty() || vb.empty()) return 0.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (int i = 0; i < kEmbedDim; ++i) {
    dot += va[i] * vb[i];
    na += va[i] * va[i];
    nb += vb[i] * vb[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  double cos = dot / std::sqrt(na * nb);
  return std::clamp(cos, 0.0, 1.0);
}

double semantic_similarity(const SemanticScorer& scorer, const std::string& a,
                           const std::string& b) {
  if (!scorer) throw Error(ErrorCode::SCORER_FAILURE, "no semantic scorer configured");
  double v = scorer(a, b);
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    throw Error(ErrorCode::SCORER_FAILURE,
                "semantic scorer returned " + std::to_string(v));
  }
  return v;
}

// ---------------------------------------------------------------------------
// METEOR

namespace {

bool is_cons(const std::string& w, std::size_t i) {
  char c = w[i];
  if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') return false;
  if (c == 'y') return i == 0 || !is_cons(w, i - 1);
  return true;
}

bool ends_cvc(const std::string& w) {
  std::size_t n = w.size();
  if (n < 3) return false;
  if (!is_cons(w, n - 3) || is_cons(w, n - 2) || !is_cons(w, n - 1)) return false;
  char last = w[n - 1];
  return last != 'w' && last != 'x' && last != 'y';
}

bool ends_with(const std::string& w, const std::string& suffix) {
  return w.size() >= suffix.size() &&
         w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string strip_participle(std::string w, const std::string& suffix) {
  w.resize(w.size() - suffix.size());
  if (w.size() >= 2 && w[w.size() - 1] == w[w.size() - 2] && is_cons(w, w.size() - 1)) {
    w.pop_back();  // hopped -> hop
  } else if (ends_cvc(w)) {
    w.push_back('e');  // taking -> take
  }
  return w;
}

}  // namespace

std::string stem_word(const std::string& word) {
  std::string w = word;
  if (ends_with(w, "'s")) w.resize(w.size() - 2);
  if (ends_with(w, "ies") && w.size() > 4) {
    w.resize(w.size() - 3);
    w += "ie";
  } else if (ends_with(w, "sses")) {
    w.resize(w.size() - 2);
  } else if (ends_with(w, "es") && w.size() > 3 &&
             (ends_with(w.substr(0, w.size() - 2), "sh") ||
              ends_with(w.substr(0, w.size() - 2), "ch") ||
              ends_with(w.substr(0, w.size() - 2), "s") ||
              ends_with(w.substr(0, w.size() - 2), "x") ||
              ends_with(w.substr(0, w.size() - 2), "z"))) {
    w.resize(w.size() - 2);
  } else if (ends_with(w, "s") && !ends_with(w, "ss") && w.size() > 3) {
    w.resize(w.size() - 1);
  }
  if (ends_with(w, "ing") && w.size() > 5) {
    w = strip_participle(w, "ing");
  } else if (ends_with(w, "ed") && w.size() > 4) {
    w = strip_participle(w, "ed");
  }
  return w;
}

namespace {

// Maximum bipartite matching between hyp and ref positions, processed in hyp
// order; candidate ref positions are tried adjacent-first so the alignment
// fragments as little as possible.
struct MeteorAlignment {
  std::vector<int> hyp_to_ref;  // -1 when unmatched
  std::size_t matches = 0;
};

bool try_augment(int h, const std::vector<std::vector<int>>& cands,
                 std::vector<int>& hyp_to_ref, std::vector<int>& ref_to_hyp,
                 std::vector<bool>& visited) {
  for (int r : cands[static_cast<std::size_t>(h)]) {
    if (visited[static_cast<std::size_t>(r)]) continue;
    visited[static_cast<std::size_t>(r)] = true;
    if (ref_to_hyp[static_cast<std::size_t>(r)] < 0 ||
        try_augment(ref_to_hyp[static_cast<std::size_t>(r)], cands, hyp_to_ref,
                    ref_to_hyp, visited)) {
      hyp_to_ref[static_cast<std::size_t>(h)] = r;
      ref_to_hyp[static_cast<std::size_t>(r)] = h;
      return true;
    }
  }
  return false;
}

void run_stage(const std::vector<std::string>& hyp_keys,
               const std::vector<std::string>& ref_keys,
               MeteorAlignment& align, std::vector<int>& ref_to_hyp) {
  std::size_t h_n = hyp_keys.size(), r_n = ref_keys.size();
  std::vector<std::vector<int>> cands(h_n);
  for (std::size_t h = 0; h < h_n; ++h) {
    if (align.hyp_to_ref[h] >= 0 || hyp_keys[h].empty()) continue;
    int prev = h > 0 ? align.hyp_to_ref[h - 1] : -1;
    // adjacent-to-previous-match candidate first
    if (prev >= 0 && static_cast<std::size_t>(prev + 1) < r_n &&
        ref_to_hyp[static_cast<std::size_t>(prev + 1)] < 0 &&
        ref_keys[static_cast<std::size_t>(prev + 1)] == hyp_keys[h]) {
      cands[h].push_back(prev + 1);
    }
    for (std::size_t r = 0; r < r_n; ++r) {
      if (ref_keys[r] == hyp_keys[h] &&
          (cands[h].empty() || cands[h][0] != static_cast<int>(r))) {
        cands[h].push_back(static_cast<int>(r));
      }
    }
  }
  for (std::size_t h = 0; h < h_n; ++h) {
    if (align.hyp_to_ref[h] >= 0 || cands[h].empty()) continue;
    std::vector<bool> visited(r_n, false);
    if (try_augment(static_cast<int>(h), cands, align.hyp_to_ref, ref_to_hyp,
                    visited)) {
      ++align.matches;
    }
  }
}

}  // namespace

double meteor(const std::string& reference, const std::string& hypothesis) {
  std::vector<std::string> ref = word_tokens(reference);
  std::vector<std::string> hyp = word_tokens(hypothesis);
  if (ref.empty() || hyp.empty()) return 0.0;

  MeteorAlignment align;
  align.hyp_to_ref.assign(hyp.size(), -1);
  std::vector<int> ref_to_hyp(ref.size(), -1);

  // stage 1: exact; stage 2: stem
  run_stage(hyp, ref, align, ref_to_hyp);
  std::vector<std::string> hyp_stems(hyp.size()), ref_stems(ref.size());
  for (std::size_t i = 0; i < hyp.size(); ++i) hyp_stems[i] = stem_word(hyp[i]);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    // mask refs already taken so the stem stage only fills gaps
    ref_stems[i] = ref_to_hyp[i] < 0 ? stem_word(ref[i]) : std::string();
  }
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    if (align.hyp_to_ref[i] >= 0) hyp_stems[i].clear();
  }
  run_stage(hyp_stems, ref_stems, align, ref_to_hyp);

  double m = static_cast<double>(align.matches);
  if (m == 0.0) return 0.0;

  // chunks: maximal runs adjacent in both sentences
  std::size_t chunks = 0;
  int prev_h = -2, prev_r = -2;
  for (std::size_t h = 0; h < hyp.size(); ++h) {
    int r = align.hyp_to_ref[h];
    if (r < 0) continue;
    if (static_cast<int>(h) != prev_h + 1 || r != prev_r + 1) ++chunks;
    prev_h = static_cast<int>(h);
    prev_r = r;
  }

  double precision = m / static_cast<double>(hyp.size());
  double recall = m / static_cast<double>(ref.size());
  constexpr double kAlpha = 0.9, kBeta = 3.0, kGamma = 0.5;
  double f_mean = precision * recall / (kAlpha * precision + (1.0 - kAlpha) * recall);
  double penalty = kGamma * std::pow(static_cast<double>(chunks) / m, kBeta);
  return f_mean * (1.0 - penalty);
}

// ---------------------------------------------------------------------------
// Edit operations

namespace {

struct EditCell {
  std::size_t cost = 0;
  std::size_t matches = 0;  // maximized among minimal-cost alignments
};

bool better(const EditCell& a, const EditCell& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  return a.matches > b.matches;
}

}  // namespace

EditOps edit_ops(const std::string& source, const std::string& hypothesis) {
  std::vector<std::string> src = word_tokens(source);
  std::vector<std::string> hyp = word_tokens(hypothesis);
  std::size_t n = src.size(), m = hyp.size();

  std::vector<std::vector<EditCell>> dp(n + 1, std::vector<EditCell>(m + 1));
  for (std::size_t i = 1; i <= n; ++i) dp[i][0] = {i, 0};
  for (std::size_t j = 1; j <= m; ++j) dp[0][j] = {j, 0};
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      EditCell best;
      if (src[i - 1] == hyp[j - 1]) {
        best = {dp[i - 1][j - 1].cost, dp[i - 1][j - 1].matches + 1};
      } else {
        best = {dp[i - 1][j - 1].cost + 1, dp[i - 1][j - 1].matches};
      }
      EditCell del{dp[i - 1][j].cost + 1, dp[i - 1][j].matches};
      EditCell ins{dp[i][j - 1].cost + 1, dp[i][j - 1].matches};
      if (better(del, best)) best = del;
      if (better(ins, best)) best = ins;
      dp[i][j] = best;
    }
  }

  // With cost and matches fixed, the operation counts are determined:
  //   cost = S + I + D,  n = M + S + D,  m = M + S + I
  EditOps ops;
  ops.matches = dp[n][m].matches;
  std::size_t cost = dp[n][m].cost;
  std::size_t s = n + m - 2 * ops.matches - cost;
  ops.substitutions = s;
  ops.deletions = n - ops.matches - s;
  ops.insertions = m - ops.matches - s;

  double denom = n > 0 ? static_cast<double>(n) : 1.0;
  ops.pct_sub = std::min(1.0, static_cast<double>(ops.substitutions) / denom);
  ops.pct_add = std::min(1.0, static_cast<double>(ops.insertions) / denom);
  ops.pct_del = std::min(1.0, static_cast<double>(ops.deletions) / denom);
  return ops;
}

// ---------------------------------------------------------------------------
// Lexical similarity

namespace {

std::vector<std::string> unique_in_order(const std::vector<std::string>& words) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& w : words) {
    if (seen.insert(w).second) out.push_back(w);
  }
  return out;
}

std::size_t list_edit_distance(const std::vector<std::string>& a,
                               const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

double lexical_similarity(const std::string& a, const std::string& b) {
  std::vector<std::string> ua = unique_in_order(word_tokens(a));
  std::vector<std::string> ub = unique_in_order(word_tokens(b));
  if (ua.empty() && ub.empty()) return 1.0;
  std::size_t d = list_edit_distance(ua, ub);
  std::size_t denom = std::max(ua.size(), ub.size());
  return 1.0 - static_cast<double>(d) / static_cast<double>(denom);
}

// ---------------------------------------------------------------------------
// Perplexity

std::vector<std::string> LanguageModel::lm_tokens(const std::string& text) const {
  return word_tokens(text);
}

double LanguageModel::perplexity(const std::string& text) const {
  std::vector<std::string> toks = lm_tokens(text);
  if (toks.empty()) {
    throw Error(ErrorCode::SCORER_FAILURE, "text has no tokens under the LM");
  }
  double mean_nll = 0.0;  // running mean stays exact for constant sequences
  std::vector<std::string> prefix;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    double lp = log_prob(prefix, toks[i]);
    if (!std::isfinite(lp)) {
      throw Error(ErrorCode::ZERO_PROBABILITY,
                  "token '" + toks[i] + "' has zero probability");
    }
    mean_nll += (-lp - mean_nll) / static_cast<double>(i + 1);
    prefix.push_back(toks[i]);
  }
  return std::exp(mean_nll);
}

double perplexity(const LanguageModel& lm, const std::string& text) {
  return lm.perplexity(text);
}

UniformLm::UniformLm(std::size_t vocab_size) : vocab_size_(vocab_size) {
  if (vocab_size_ == 0) {
    throw Error(ErrorCode::SCORER_FAILURE, "uniform LM needs vocab_size >= 1");
  }
}

double UniformLm::log_prob(const std::vector<std::string>&, const std::string&) const {
  return -std::log(static_cast<double>(vocab_size_));
}

double UniformLm::perplexity(const std::string& text) const {
  if (lm_tokens(text).empty()) {
    throw Error(ErrorCode::SCORER_FAILURE, "text has no tokens under the LM");
  }
  // exact closed form of exp(mean NLL) for the uniform distribution
  return static_cast<double>(vocab_size_);
}

BigramLm::BigramLm(const std::vector<std::string>& texts, double smoothing)
    : smoothing_(smoothing) {
  std::set<std::string> vocab;
  for (const auto& text : texts) {
    std::string prev = "<s>";
    for (const auto& tok : word_tokens(text)) {
      vocab.insert(tok);
      bigram_[prev][tok] += 1;
      unigram_[prev] += 1;
      prev = tok;
    }
  }
  vocab_size_ = vocab.size() + 1;  // + unseen bucket
}

double BigramLm::log_prob(const std::vector<std::string>& prefix,
                          const std::string& token) const {
  std::string prev = prefix.empty() ? "<s>" : prefix.back();
  std::size_t ctx = 0, hits = 0;
  auto u = unigram_.find(prev);
  if (u != unigram_.end()) ctx = u->second;
  auto b = bigram_.find(prev);
  if (b != bigram_.end()) {
    auto t = b->second.find(token);
    if (t != b->second.end()) hits = t->second;
  }
  double num = static_cast<double>(hits) + smoothing_;
  double den = static_cast<double>(ctx) + smoothing_ * static_cast<double>(vocab_size_);
  return std::log(num / den);
}

// ---------------------------------------------------------------------------
// Formality

namespace {

const std::set<std::string>& filler_lexicon() {
  static const std::set<std::string> kFillers = {
      "uh", "um", "er", "ah", "hm", "hmm", "well", "like",
      "kinda", "sorta", "y'know", "yeah", "okay", "ok",
  };
  return kFillers;
}

bool is_contraction(const std::string& w) {
  std::size_t apos = w.find('\'');
  return apos != std::string::npos && apos > 0 && apos + 1 < w.size();
}

}  // namespace

double heuristic_formality(const std::string& text) {
  std::vector<std::string> words = word_tokens(text);
  if (words.empty()) return 0.0;
  double fillers = 0.0, contractions = 0.0;
  for (const auto& w : words) {
    if (filler_lexicon().count(w)) fillers += 1.0;
    if (is_contraction(w)) contractions += 1.0;
  }
  double n = static_cast<double>(words.size());
  double lowercase_start = 0.0;
  for (char c : text) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      lowercase_start = std::islower(static_cast<unsigned char>(c)) ? 1.0 : 0.0;
      break;
    }
  }
  double penalty =
      0.8 * (fillers / n) + 0.6 * (contractions / n) + 0.2 * lowercase_start;
  return 1.0 - std::min(1.0, penalty);
}

double formality(const TextScorer& scorer, const std::string& text) {
  if (!scorer) throw Error(ErrorCode::SCORER_FAILURE, "no formality scorer configured");
  double v = scorer(text);
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    throw Error(ErrorCode::SCORER_FAILURE,
                "formality scorer returned " + std::to_string(v));
  }
  return v;
}

// ---------------------------------------------------------------------------
// Quality report

namespace {

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  double n = static_cast<double>(values.size());
  for (double v : values) out.mean += v;
  out.mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(var / n);
  return out;
}

}  // namespace

QualityReport quality_report(const PairDataset& dataset, const ScorerRegistry& scorers) {
  std::vector<double> sem, form, met, subs, adds, dels, lex, ppl;
  std::shared_ptr<LanguageModel> lm = scorers.lm;
  std::string lm_name = scorers.lm_name;
  if (!lm) {
    std::vector<std::string> originals;
    for (const auto& p : dataset.pairs) originals.push_back(p.original.text);
    lm = std::make_shared<BigramLm>(originals);
    lm_name = "bigram-lm(originals)";
  }

  QualityReport report;
  for (const auto& pair : dataset.pairs) {
    if (!pair.flags.empty()) {
      ++report.pairs_excluded;
      continue;
    }
    const std::string& a = pair.original.text;
    const std::string& b = pair.obfuscated;
    sem.push_back(semantic_similarity(scorers.semantic, a, b));
    form.push_back(formality(scorers.formality, b));
    met.push_back(meteor(a, b));
    EditOps ops = edit_ops(a, b);
    subs.push_back(ops.pct_sub);
    adds.push_back(ops.pct_add);
    dels.push_back(ops.pct_del);
    lex.push_back(lexical_similarity(a, b));
    ppl.push_back(perplexity(*lm, b));
    ++report.pairs_scored;
  }
  if (report.pairs_scored == 0) {
    throw Error(ErrorCode::EMPTY_TRAINSET, "no flag-free pairs to score");
  }
  report.semantics = mean_std(sem);
  report.formality = mean_std(form);
  report.meteor = mean_std(met);
  report.pct_sub = mean_std(subs);
  report.pct_add = mean_std(adds);
  report.pct_del = mean_std(dels);
  report.simi_lex = mean_std(lex);
  report.perplexity = mean_std(ppl);
  report.scorer_names = {
      {"S", scorers.semantic_name},
      {"Formality", scorers.formality_name},
      {"METEOR", "meteor(exact+stem)"},
      {"%SUB", "word-edit-alignment"},
      {"%ADD", "word-edit-alignment"},
      {"%DEL", "word-edit-alignment"},
      {"Simi_Lex", "unique-word-levenshtein"},
      {"Perplexity", lm_name},
  };
  return report;
}

std::string quality_report_to_json(const QualityReport& report) {
  json j;
  auto put = [&](const char* key, const MeanStd& ms) {
    j["columns"][key] = {{"mean", ms.mean}, {"std", ms.stddev}};
  };
  put("S", report.semantics);
  put("Formality", report.formality);
  put("METEOR", report.meteor);
  put("%SUB", report.pct_sub);
  put("%ADD", report.pct_add);
  put("%DEL", report.pct_del);
  put("Simi_Lex", report.simi_lex);
  put("Perplexity", report.perplexity);
  j["pairs_scored"] = report.pairs_scored;
  j["pairs_excluded"] = report.pairs_excluded;
  j["scorers"] = report.scorer_names;
  j["schema_version"] = 1;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// F1

double f1_score(const std::vector<bool>& predicted, const std::vector<bool>& truth) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorCode::SCORER_FAILURE, "prediction/label length mismatch");
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] && truth[i]) ++tp;
    else if (predicted[i] && !truth[i]) ++fp;
    else if (!predicted[i] && truth[i]) ++fn;
  }
  if (2 * tp + fp + fn == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) /
         static_cast<double>(2 * tp + fp + fn);
}

}  // namespace didots
