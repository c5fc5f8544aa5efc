// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion. Exit code 0 only when all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "didots/adversary.hpp"
#include "didots/backend.hpp"
#include "didots/common.hpp"
#include "didots/corpus.hpp"
#include "didots/decode.hpp"
#include "didots/lingfeat.hpp"
#include "didots/llm_client.hpp"
#include "didots/metrics.hpp"
#include "didots/prompting.hpp"
#include "didots/report.hpp"
#include "didots/synthesis.hpp"
#include "didots/text.hpp"
#include "didots/trainer.hpp"

using namespace didots;

namespace {

struct Harness {
  int failures = 0;

  void run(int number, const std::string& title, const std::function<void()>& body) {
    auto start = std::chrono::steady_clock::now();
    std::string failure;
    try {
      body();
    } catch (const std::exception& e) {
      failure = e.what();
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (failure.empty()) {
      std::printf("[PASS] criterion %2d: %s (%.1fs)\n", number, title.c_str(), secs);
    } else {
      std::printf("[FAIL] criterion %2d: %s (%.1fs)\n       %s\n", number, title.c_str(),
                  secs, failure.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
};

void require(bool condition, const std::string& message) {
  if (!condition) throw std::runtime_error(message);
}

WordTokenizer small_vocab() {
  return WordTokenizer::fit({"the boy takes a cookie", "the girl washes dishes",
                             "uh um water runs over", "the dog watches the jar",
                             "the lady opens the curtain"});
}

MicroTransformer model_with_dims(int d_model, std::uint64_t seed) {
  MicroConfig config;
  config.d_model = d_model;
  config.ffn_dim = d_model * 2;
  config.enc_layers = 2;
  config.dec_layers = 2;
  config.max_positions = 64;
  config.seed = seed;
  return MicroTransformer(small_vocab(), config);
}

bool bit_equal(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) return false;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    if (a.data[i] != b.data[i]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// 1. LoRA algebra

void criterion_lora_algebra() {
  Rng rng(1);
  int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    int d_model = 8 + static_cast<int>(rng.next_below(5)) * 8;  // 8..40
    int rank = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(d_model)));
    MicroTransformer base = model_with_dims(d_model, 1000 + trial);

    std::vector<int> src{4, 5, 6, WordTokenizer::kEos};
    std::vector<int> tgt{1, 4, 5};
    Matrix base_out = base.forward_logits(src, tgt);

    AdapterSpec spec;
    spec.kind = AdapterKind::LORA;
    spec.rank = rank;
    spec.alpha = 1.0 + rng.next_double() * 63.0;
    base.attach_adapter(spec, 2000 + trial);

    // zero-init adapters leave outputs bit-comparable to base
    Matrix init_out = base.forward_logits(src, tgt);
    require(bit_equal(base_out, init_out),
            "zero-init adapter changed outputs at trial " + std::to_string(trial));

    for (Parameter* p : base.adapter_params()) {
      Rng prng(3000 + trial + p->value.size());
      p->value = Matrix::gaussian(p->value.rows, p->value.cols, prng, 0.05);
    }
    Matrix unmerged = base.forward_logits(src, tgt);
    MicroTransformer merged = base;
    merged.merge_adapter();
    Matrix merged_out = merged.forward_logits(src, tgt);

    double rel = max_abs_diff(unmerged, merged_out) / (1.0 + max_abs(unmerged));
    require(rel <= 1e-6, "merged/unmerged diverge: rel " + std::to_string(rel) +
                             " at trial " + std::to_string(trial));
  }
}

// ---------------------------------------------------------------------------
// 2. Adapter parameter count

void criterion_param_count() {
  ShapeRegistry registry = bart_base_shape_registry();
  AdapterSpec spec;
  spec.kind = AdapterKind::LORA;
  spec.rank = 16;
  std::size_t count = adapter_param_count(spec, registry);
  require(count == 884736u, "expected 884736, got " + std::to_string(count));
  require(default_lora_targets(registry).size() == 36,
          "expected 36 q/v targets across encoder self, decoder self, decoder cross");

  std::size_t full = registry_param_count(registry);
  require(full >= 130'000'000u && full <= 150'000'000u,
          "registry should be 1.4e8-scale, got " + std::to_string(full));
  double ratio = static_cast<double>(count) / static_cast<double>(full);
  require(ratio < 0.01, "adapter/full ratio " + std::to_string(ratio) + " >= 1%");
}

// ---------------------------------------------------------------------------
// 3. Gradient correctness

void criterion_gradients() {
  MicroTransformer model = model_with_dims(16, 42);
  AdapterSpec spec;
  spec.rank = 3;
  model.attach_adapter(spec, 43);
  for (Parameter* p : model.adapter_params()) {
    Rng prng(p->value.size() * 7 + 1);
    p->value = Matrix::gaussian(p->value.rows, p->value.cols, prng, 0.05);
  }
  std::vector<int> src{4, 5, 6, 7, WordTokenizer::kEos};
  std::vector<int> tgt{5, 6, 7};
  model.zero_grads();
  model.sequence_loss(src, tgt, true);

  Rng pick(44);
  std::vector<Parameter*> adapters = model.adapter_params();
  for (int checked = 0; checked < 24; ++checked) {
    Parameter* p = adapters[pick.next_below(adapters.size())];
    std::size_t at = pick.next_below(p->value.data.size());
    double analytic = p->grad.data[at];
    const double eps = 1e-5;
    double saved = p->value.data[at];
    p->value.data[at] = saved + eps;
    double up = model.sequence_loss(src, tgt, false);
    p->value.data[at] = saved - eps;
    double down = model.sequence_loss(src, tgt, false);
    p->value.data[at] = saved;
    double numeric = (up - down) / (2 * eps);
    double rel = std::fabs(analytic - numeric) /
                 std::max({1e-8, std::fabs(analytic), std::fabs(numeric)});
    require(rel <= 1e-4, "coordinate " + std::to_string(checked) + " of " + p->name +
                             " rel error " + std::to_string(rel));
  }
}

// ---------------------------------------------------------------------------
// 4. End-to-end fixture pipeline

void criterion_end_to_end() {
  Corpus corpus = synth_fixture(7, 50);  // 200 samples, 100 per split
  Corpus train_split = corpus.filter_split(Split::TRAIN);

  // stage 1: MOCK synthesis over the training split
  LlmClient client("mock:");
  PromptTemplate kb = builtin_template(Strategy::KB);
  PairDataset pairs = build_pairs(train_split, Strategy::KB, client, kb);
  require(pairs.stats.clean_fraction() == 1.0, "mock synthesis must be fully clean");

  // student: tokenizer over both sides, copy pretraining, LoRA fine-tune
  std::vector<std::string> texts;
  for (const auto& p : pairs.pairs) {
    texts.push_back(p.original.text);
    texts.push_back(p.obfuscated);
  }
  MicroConfig mc;
  mc.seed = 7;
  MicroTransformer model(WordTokenizer::fit(texts), mc);

  PairDataset pretrain = copy_pairs(texts);
  PairDataset pre_train, pre_val;
  for (std::size_t i = 0; i < pretrain.pairs.size(); ++i) {
    if (i % 5 == 4) pre_val.pairs.push_back(pretrain.pairs[i]);
    else pre_train.pairs.push_back(pretrain.pairs[i]);
  }
  pre_train.recompute_stats();
  pre_val.recompute_stats();
  TrainConfig pre_cfg;
  pre_cfg.max_epochs = 30;
  pre_cfg.learning_rate = 2e-3;
  pre_cfg.batch_size = 8;
  pre_cfg.patience = 10;
  pre_cfg.seed = 7;
  train(model, pre_train, pre_cfg, pre_val);

  AdapterSpec spec;  // LoRA r=16, alpha=32, q/v targets
  model.attach_adapter(spec, 8);
  PairDataset tune_train, tune_val;
  for (std::size_t i = 0; i < pairs.pairs.size(); ++i) {
    if (i % 5 == 4) tune_val.pairs.push_back(pairs.pairs[i]);
    else tune_train.pairs.push_back(pairs.pairs[i]);
  }
  tune_train.recompute_stats();
  tune_val.recompute_stats();
  TrainConfig tune_cfg;
  tune_cfg.max_epochs = 30;
  tune_cfg.learning_rate = 2e-3;
  tune_cfg.batch_size = 8;
  tune_cfg.patience = 10;
  tune_cfg.seed = 8;
  train(model, tune_train, tune_cfg, tune_val);

  // memoized student obfuscator
  auto cache = std::make_shared<std::map<std::string, std::string>>();
  DecodeConfig dc;
  dc.beams = 4;
  dc.max_length = 32;
  Obfuscator student = [&model, cache, dc](const std::string& text) {
    auto it = cache->find(text);
    if (it != cache->end()) return it->second;
    std::string out = decode(model, text, dc);
    (*cache)[text] = out;
    return out;
  };

  // attack grid: kernel + neural, static + adaptive
  std::vector<AdversaryConfig> configs;
  for (AdversaryKind kind : {AdversaryKind::KERNEL, AdversaryKind::NEURAL}) {
    for (AdversarySetting setting :
         {AdversarySetting::STATIC, AdversarySetting::ADAPTIVE}) {
      AdversaryConfig ac;
      ac.kind = kind;
      ac.setting = setting;
      // the BERT-scale default learning rate cannot move a from-scratch network;
      // the desk-scale reference needs a workable rate
      ac.neural.lr = 0.01;
      ac.neural.epochs = 40;
      ac.neural.patience = 5;
      configs.push_back(ac);
    }
  }
  PrivacyReport report = evaluate_privacy(student, corpus, configs);

  double kernel_base = report.baselines.at(AdversaryKind::KERNEL);
  double neural_base = report.baselines.at(AdversaryKind::NEURAL);
  require(kernel_base >= 0.9,
          "static kernel baseline " + std::to_string(kernel_base) + " < 0.9");
  require(neural_base >= 0.9,
          "static neural baseline " + std::to_string(neural_base) + " < 0.9");

  for (const auto& cell : report.cells) {
    if (cell.setting != AdversarySetting::STATIC) continue;
    require(cell.drop >= 0.2, std::string(adversary_kind_name(cell.kind)) +
                                  " static drop " + std::to_string(cell.drop) + " < 0.2");
  }

  Corpus adaptive = build_adaptive_trainset(train_split, student);
  require(adaptive.size() == 2 * train_split.size(), "adaptive trainset must be 2x raw");
}

// ---------------------------------------------------------------------------
// 5. Metric oracles

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
    if (src[i] == hyp[j]) ++diag.matches;
    else {
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

void criterion_metric_oracles() {
  // edit_ops vs brute force on 200 random pairs
  Rng rng(20240901);
  const std::vector<std::string> bank = {"a", "b", "c", "d", "e", "f"};
  auto random_sentence = [&](std::size_t max_len) {
    std::size_t n = rng.next_below(max_len + 1);
    std::vector<std::string> toks;
    for (std::size_t i = 0; i < n; ++i) toks.push_back(bank[rng.next_below(bank.size())]);
    return join(toks, " ");
  };
  for (int trial = 0; trial < 200; ++trial) {
    std::string a = random_sentence(8), b = random_sentence(8);
    OracleCounts best;
    bool found = false;
    enumerate_scripts(word_tokens(a), word_tokens(b), 0, 0, OracleCounts{}, best, found);
    EditOps got = edit_ops(a, b);
    require(got.substitutions == best.subs && got.insertions == best.ins &&
                got.deletions == best.dels && got.matches == best.matches,
            "edit_ops mismatch on ('" + a + "', '" + b + "')");
  }

  // uniform-LM perplexity equals |V| exactly
  for (std::size_t v : {2, 3, 7, 10, 977}) {
    UniformLm lm(v);
    double ppl = perplexity(lm, "the boy takes a cookie today");
    require(ppl == static_cast<double>(v),
            "uniform ppl " + std::to_string(ppl) + " != " + std::to_string(v));
  }

  // lexical similarity hand values
  require(lexical_similarity("the boy runs", "the boy runs") == 1.0, "lexsim identity");
  require(lexical_similarity("aa bb cc", "xx yy zz") == 0.0, "lexsim disjoint");
  require(std::fabs(lexical_similarity("the boy runs", "the girl runs") -
                    (1.0 - 1.0 / 3.0)) <= 1e-9,
          "lexsim single substitution");

  // METEOR hand values
  require(meteor("the boy takes a cookie", "zebra quantum flux") == 0.0, "meteor zero");
  require(std::fabs(meteor("the boy takes a cookie", "the boy takes a cookie") - 0.996) <=
              1e-9,
          "meteor identity 0.996");
  require(meteor("alpha beta gamma delta epsilon", "epsilon delta gamma beta alpha") <
              meteor("alpha beta gamma delta epsilon", "alpha beta gamma delta epsilon"),
          "meteor fragmentation penalty");

  // F1 vs the confusion-matrix formula on 1000 random vectors
  Rng frng(555);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t n = 1 + frng.next_below(40);
    std::vector<bool> pred(n), truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = frng.next_double() < 0.5;
      truth[i] = frng.next_double() < 0.5;
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
    require(std::fabs(f1_score(pred, truth) - expected) <= 1e-12, "f1 formula mismatch");
  }
}

// ---------------------------------------------------------------------------
// 6. Failure triage

void criterion_failure_triage() {
  PromptTemplate zs = builtin_template(Strategy::ZS);
  PromptTemplate fs = builtin_template(Strategy::FS);

  auto refusal = classify_failure(
      "everything that's going on okay.",
      "I cannot create dementia samples or any other type of content that may be "
      "offensive or harmful to individuals with dementia or their caregivers.",
      zs);
  require(refusal.count(PairFlag::REFUSAL) == 1, "refusal row not flagged REFUSAL");

  auto echo = classify_failure(
      "and let's see.",
      "Please provide the sentence you'd like me to rewrite, and I'll follow the format "
      "to create both dementia and healthy samples.",
      fs);
  require(echo.count(PairFlag::INSTRUCTION_ECHO) == 1,
          "repeated-instructions row not flagged INSTRUCTION_ECHO");

  auto idem = classify_failure(
      "and he's about to hand her a cookie.",
      "Keep it the same, no need to replace as the given healthy sentence is already "
      "clear",
      zs);
  require(idem.count(PairFlag::IDEM) == 1, "idem row not flagged IDEM");

  Corpus corpus = synth_fixture(7, 25);  // exactly 100 samples
  LlmClient client("mock:refuse_every=25");
  PairDataset pairs = build_pairs(corpus, Strategy::KB, client, builtin_template(Strategy::KB));
  require(pairs.pairs.size() == 100, "expected 100 pairs");
  require(pairs.stats.flagged_fraction() == 0.04,
          "flagged fraction " + std::to_string(pairs.stats.flagged_fraction()) +
              " != 0.04 exactly");
}

// ---------------------------------------------------------------------------
// 7. Corpus rules

void criterion_corpus_rules() {
  auto segged = segment_document("ok. the mother washes dishes.", "d-");
  require(segged.size() == 1 && segged[0].text == "the mother washes dishes.",
          "the <3-word sentence must be dropped");

  std::vector<TranscriptSample> samples;
  auto push = [&](Split split, Label label, std::size_t n, const std::string& prefix) {
    for (std::size_t i = 0; i < n; ++i) {
      TranscriptSample s;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%s-%05zu", prefix.c_str(), i);
      s.id = buf;
      s.text = "the boy takes a cookie";
      s.label = label;
      s.split = split;
      samples.push_back(s);
    }
  };
  push(Split::TRAIN, Label::CC, 619, "tr-cc");
  push(Split::TRAIN, Label::AD, 560, "tr-ad");
  push(Split::TEST, Label::CC, 270, "te-cc");
  push(Split::TEST, Label::AD, 230, "te-ad");
  Corpus corpus(std::move(samples), "adress-shaped");

  SplitReport expected;
  expected.cell(Split::TRAIN, Label::CC) = 619;
  expected.cell(Split::TRAIN, Label::AD) = 560;
  expected.cell(Split::TEST, Label::CC) = 270;
  expected.cell(Split::TEST, Label::AD) = 230;
  validate_splits(corpus, expected);  // must not throw

  expected.cell(Split::TEST, Label::AD) = 231;
  bool failed_loudly = false;
  try {
    validate_splits(corpus, expected);
  } catch (const Error& e) {
    failed_loudly = e.code() == ErrorCode::SPLIT_MISMATCH &&
                    std::string(e.what()).find("test/AD") != std::string::npos;
  }
  require(failed_loudly, "off-by-one expectation must raise SPLIT_MISMATCH naming the cell");
}

// ---------------------------------------------------------------------------
// 8. Feature profiles

void criterion_feature_profiles() {
  Tagger tagger = rule_tagger();
  // hand-tagged golden: well uh the boy runs -> INTJ INTJ DET NOUN VERB
  FeatureProfile p =
      feature_profile(std::vector<std::string>{"well uh the boy runs"}, tagger);
  require(p.prop_interjections == 0.4, "prop_interjections != 2/5");
  require(p.prop_nouns == 0.2, "prop_nouns != 1/5");
  require(p.prop_verbs == 0.2, "prop_verbs != 1/5");
  // syllables: well(1) uh(1) the(1) boy(1) runs(1) = 5/5
  require(p.mean_syllables_per_word == 1.0, "mean syllables != 1.0");

  // generic markers: the boy takes something -> something is a generic noun
  FeatureProfile g =
      feature_profile(std::vector<std::string>{"the boy takes something"}, tagger);
  require(g.generic_nouns.has_value() && *g.generic_nouns == 0.5,
          "generic noun share != 1/2");

  ChangeReport identity = percent_change(p, p);
  for (const auto& row : identity.rows) {
    if (row.pct_change.has_value()) {
      require(*row.pct_change == 0.0, row.feature + " non-zero on identity");
    }
  }

  const std::vector<std::pair<std::string, Direction>> arrows = {
      {"prop_interjections", Direction::DOWN}, {"prop_adverbs", Direction::DOWN},
      {"mean_syllables_per_word", Direction::UP}, {"prop_nouns", Direction::UP},
      {"prop_modals", Direction::UP}, {"prop_verbs", Direction::UP},
      {"ratio_verbs_nouns", Direction::DOWN}, {"ratio_adverbs_nouns", Direction::DOWN},
      {"generic_nouns", Direction::DOWN}, {"generic_verbs", Direction::DOWN},
  };
  require(identity.rows.size() == arrows.size(), "expected 10 feature rows");
  for (std::size_t i = 0; i < arrows.size(); ++i) {
    require(identity.rows[i].feature == arrows[i].first, "row order mismatch at " +
                                                             std::to_string(i));
    require(identity.rows[i].desired == arrows[i].second,
            "direction arrow mismatch for " + arrows[i].first);
  }
}

// ---------------------------------------------------------------------------
// 9. DP baseline semantics

void criterion_dp_baseline() {
  // a lightly trained micro-model keeps non-degenerate distributions
  MicroTransformer model = model_with_dims(32, 77);
  std::vector<std::string> texts = {"the boy takes a cookie", "the girl washes dishes",
                                    "the dog watches the jar",
                                    "the lady opens the curtain"};
  PairDataset pairs = copy_pairs(texts);
  TrainConfig tc;
  tc.max_epochs = 8;
  tc.learning_rate = 2e-3;
  tc.batch_size = 4;
  tc.seed = 5;
  train(model, pairs, tc, pairs);

  const std::vector<double> temperatures = {1.0, 1.5, 2.0, 5.0};
  const int samples_per_t = 1000;
  std::vector<std::vector<double>> entropies(temperatures.size());
  for (std::size_t t = 0; t < temperatures.size(); ++t) {
    DecodeConfig dc;
    dc.mode = DecodeMode::SAMPLE;
    dc.temperature = temperatures[t];
    dc.max_length = 6;
    Rng rng(9000 + t);
    for (int i = 0; i < samples_per_t; ++i) {
      SampleTrace trace = sample_trace(model, "the boy takes a cookie", dc, rng);
      double mean = 0.0;
      for (double h : trace.step_entropies) mean += h;
      mean /= std::max<std::size_t>(1, trace.step_entropies.size());
      entropies[t].push_back(mean);
    }
  }

  // one-sided Welch test that entropy strictly rises between adjacent
  // temperatures: reject "not greater" at p < 0.01 (z > 2.326)
  auto mean_of = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    return m / static_cast<double>(v.size());
  };
  auto var_of = [&](const std::vector<double>& v, double m) {
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
  };
  for (std::size_t t = 0; t + 1 < temperatures.size(); ++t) {
    double m1 = mean_of(entropies[t]), m2 = mean_of(entropies[t + 1]);
    double v1 = var_of(entropies[t], m1), v2 = var_of(entropies[t + 1], m2);
    double z = (m2 - m1) / std::sqrt(v1 / samples_per_t + v2 / samples_per_t + 1e-18);
    require(m2 >= m1, "entropy decreased from T=" + std::to_string(temperatures[t]) +
                          " to T=" + std::to_string(temperatures[t + 1]));
    require(z > 2.326, "increase not significant at p<0.01: z = " + std::to_string(z) +
                           " between T=" + std::to_string(temperatures[t]) + " and T=" +
                           std::to_string(temperatures[t + 1]));
  }
}

// ---------------------------------------------------------------------------
// 10. Report shape

void criterion_report_shape() {
  PrivacyReport privacy;
  privacy.baselines[AdversaryKind::NEURAL] = 0.95;
  privacy.baselines[AdversaryKind::KERNEL] = 0.93;
  const double values[] = {0.37, 0.55, 0.49, 0.58};
  int i = 0;
  for (AdversaryKind kind : {AdversaryKind::NEURAL, AdversaryKind::KERNEL}) {
    for (AdversarySetting setting :
         {AdversarySetting::STATIC, AdversarySetting::ADAPTIVE}) {
      PrivacyCell cell;
      cell.kind = kind;
      cell.setting = setting;
      cell.f1 = values[i++];
      privacy.cells.push_back(cell);
    }
  }
  ResultsGrid grid = build_grid("didots", privacy, 0.85);

  const std::vector<std::string> expected_columns = {"System", "BERT S", "BERT A",
                                                     "SVM S",  "SVM A",  "Avg F1", "Sem."};
  require(ResultsGrid::columns() == expected_columns, "column structure mismatch");
  require(grid.rows.size() == 2, "expected Original + system rows");

  const ReportRow& row = grid.rows[1];
  require(row.bert_static && row.bert_adaptive && row.svm_static && row.svm_adaptive,
          "all four adversary cells must be present");
  double mean = (values[0] + values[1] + values[2] + values[3]) / 4.0;
  require(row.avg_f1.has_value() && std::fabs(*row.avg_f1 - mean) <= 1e-12,
          "Avg F1 must equal the mean of the four cells to 1e-12");
  require(row.semantics.has_value() && *row.semantics == 0.85, "semantics cell lost");

  std::string csv = grid_to_csv(grid);
  require(csv.rfind("System,BERT S,BERT A,SVM S,SVM A,Avg F1,Sem.", 0) == 0,
          "CSV header mismatch");
}

}  // namespace

int main() {
  Harness harness;
  harness.run(1, "LoRA algebra: merged/unmerged agreement and zero-init identity",
              criterion_lora_algebra);
  harness.run(2, "adapter parameter count: 884,736 and <1% of full",
              criterion_param_count);
  harness.run(3, "adapter gradients match central finite differences",
              criterion_gradients);
  harness.run(4, "end-to-end fixture pipeline: baselines >=0.9, static drops >=0.2",
              criterion_end_to_end);
  harness.run(5, "metric oracles: edit ops, perplexity, lexical, METEOR, F1",
              criterion_metric_oracles);
  harness.run(6, "failure triage rows and the exact 4% refusal stream",
              criterion_failure_triage);
  harness.run(7, "corpus rules: 3-word floor and split validation",
              criterion_corpus_rules);
  harness.run(8, "feature profiles: goldens, identity change, direction arrows",
              criterion_feature_profiles);
  harness.run(9, "DP baseline: sampling entropy non-decreasing in temperature",
              criterion_dp_baseline);
  harness.run(10, "report shape: Table-structured grid with exact Avg F1",
              criterion_report_shape);

  if (harness.failures == 0) {
    std::printf("all 10 acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria failed\n", harness.failures);
  return 1;
}
