#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "didots/backend.hpp"
#include "didots/checkpoint.hpp"
#include "didots/common.hpp"
#include "didots/decode.hpp"
#include "didots/matrix.hpp"
#include "didots/trainer.hpp"

using namespace didots;

namespace {

WordTokenizer tiny_tokenizer() {
  return WordTokenizer::fit({"the boy takes a cookie", "the girl washes the dishes",
                             "uh um water runs over", "the dog watches the jar"});
}

MicroTransformer tiny_model(std::uint64_t seed = 3, int d = 16, int f = 24) {
  MicroConfig config;
  config.d_model = d;
  config.ffn_dim = f;
  config.enc_layers = 2;
  config.dec_layers = 2;
  config.max_positions = 64;
  config.seed = seed;
  return MicroTransformer(tiny_tokenizer(), config);
}

bool matrices_equal(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) return false;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    if (a.data[i] != b.data[i]) return false;
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Attach / init identity

TEST_CASE("freshly attached adapters leave outputs bit-comparable to base") {
  std::vector<int> src{4, 5, 6, WordTokenizer::kEos};
  std::vector<int> tgt{1, 4, 5};

  for (AdapterKind kind : {AdapterKind::LORA, AdapterKind::IA3, AdapterKind::BOTTLENECK}) {
    MicroTransformer base = tiny_model();
    Matrix before = base.forward_logits(src, tgt);
    AdapterSpec spec;
    spec.kind = kind;
    spec.rank = 4;
    base.attach_adapter(spec);
    Matrix after = base.forward_logits(src, tgt);
    CAPTURE(adapter_kind_name(kind));
    CHECK(matrices_equal(before, after));
  }
}

TEST_CASE("attach freezes base weights and exposes only adapter parameters") {
  MicroTransformer model = tiny_model();
  AdapterSpec spec;
  spec.rank = 4;
  model.attach_adapter(spec);
  for (Parameter* p : model.trainable_params()) {
    CHECK(p->name.rfind("adapter.", 0) == 0);
  }
  CHECK_FALSE(model.adapter_params().empty());
}

TEST_CASE("rank beyond min(d,k) is rejected") {
  MicroTransformer model = tiny_model();
  AdapterSpec spec;
  spec.rank = 800;
  try {
    model.attach_adapter(spec);
    FAIL("expected RANK_TOO_LARGE");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RANK_TOO_LARGE);
  }
}

TEST_CASE("unknown adapter targets are rejected") {
  MicroTransformer model = tiny_model();
  AdapterSpec spec;
  spec.rank = 2;
  spec.targets = {"enc.0.self.q", "nope.w"};
  try {
    model.attach_adapter(spec);
    FAIL("expected UNKNOWN_TARGET");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UNKNOWN_TARGET);
  }
}

// ---------------------------------------------------------------------------
// Parameter counting

TEST_CASE("BART-base-shaped registry reproduces the 884k adapter count") {
  ShapeRegistry registry = bart_base_shape_registry();
  AdapterSpec spec;
  spec.kind = AdapterKind::LORA;
  spec.rank = 16;
  std::vector<std::string> targets = default_lora_targets(registry);
  CHECK(targets.size() == 36);
  CHECK(adapter_param_count(spec, registry) == 884736u);  // 36 * 16 * (768 + 768)

  std::size_t full = registry_param_count(registry);
  CHECK(full > 100'000'000u);
  CHECK(static_cast<double>(adapter_param_count(spec, registry)) /
            static_cast<double>(full) <
        0.01);
}

TEST_CASE("smallest LORA case counts r*(d+k)") {
  ShapeRegistry registry{{"w", {2, 2}}};
  AdapterSpec spec;
  spec.rank = 1;
  spec.targets = {"w"};
  CHECK(adapter_param_count(spec, registry) == 4u);
}

TEST_CASE("IA3 counts scale-vector lengths") {
  ShapeRegistry registry{{"a", {100, 64000}}, {"b", {7, 500}}};
  AdapterSpec spec;
  spec.kind = AdapterKind::IA3;
  spec.targets = {"a", "b"};
  CHECK(adapter_param_count(spec, registry) == 64500u);
}

TEST_CASE("bottleneck counts projections plus biases") {
  ShapeRegistry registry{{"w", {8, 6}}};
  AdapterSpec spec;
  spec.kind = AdapterKind::BOTTLENECK;
  spec.rank = 2;
  spec.targets = {"w"};
  // down 6x2 + bias 2 + up 2x6 + bias 6
  CHECK(adapter_param_count(spec, registry) == 6u * 2 + 2 + 2 * 6 + 6);
}

// ---------------------------------------------------------------------------
// Merge

TEST_CASE("merged and unmerged forwards agree within 1e-6 relative") {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    MicroTransformer model = tiny_model(100 + trial);
    AdapterSpec spec;
    spec.rank = 2 + static_cast<int>(rng.next_below(6));
    spec.alpha = 1.0 + rng.next_double() * 40.0;
    model.attach_adapter(spec, 200 + trial);
    // give the adapter a real delta
    for (Parameter* p : model.adapter_params()) {
      Rng prng(trial * 31 + 5);
      p->value = Matrix::gaussian(p->value.rows, p->value.cols, prng, 0.05);
    }
    std::vector<int> src{4, 5, 6, WordTokenizer::kEos};
    std::vector<int> tgt{1, 4};
    Matrix unmerged = model.forward_logits(src, tgt);
    MicroTransformer merged = model;
    merged.merge_adapter();
    Matrix merged_out = merged.forward_logits(src, tgt);
    double denom = 1.0 + max_abs(unmerged);
    CHECK(max_abs_diff(unmerged, merged_out) / denom <= 1e-6);
  }
}

TEST_CASE("merging a zero-initialized adapter leaves weights exactly unchanged") {
  MicroTransformer model = tiny_model();
  Matrix w_before = model.param("enc.0.self.q").value;
  AdapterSpec spec;
  spec.rank = 4;
  model.attach_adapter(spec);
  model.merge_adapter();
  CHECK(matrices_equal(model.param("enc.0.self.q").value, w_before));
}

TEST_CASE("second merge is rejected") {
  MicroTransformer model = tiny_model();
  AdapterSpec spec;
  spec.rank = 4;
  model.attach_adapter(spec);
  model.merge_adapter();
  try {
    model.merge_adapter();
    FAIL("expected NO_ADAPTER");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NO_ADAPTER);
  }
}

TEST_CASE("IA3 and bottleneck adapters refuse to merge") {
  for (AdapterKind kind : {AdapterKind::IA3, AdapterKind::BOTTLENECK}) {
    MicroTransformer model = tiny_model();
    AdapterSpec spec;
    spec.kind = kind;
    spec.rank = 2;
    model.attach_adapter(spec);
    try {
      model.merge_adapter();
      FAIL("expected UNSUPPORTED_KIND");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UNSUPPORTED_KIND);
    }
  }
}

// ---------------------------------------------------------------------------
// Gradient flow

TEST_CASE("one training step leaves base weights bit-unchanged") {
  MicroTransformer model = tiny_model();
  AdapterSpec spec;
  spec.rank = 4;
  model.attach_adapter(spec);

  std::vector<Matrix> base_before;
  std::vector<std::string> base_names;
  for (const auto& name : model.param_names()) {
    if (name.rfind("adapter.", 0) != 0) {
      base_names.push_back(name);
      base_before.push_back(model.param(name).value);
    }
  }
  Matrix b_before = model.param("adapter.enc.0.self.q.B").value;

  model.zero_grads();
  model.sequence_loss({4, 5, 6, WordTokenizer::kEos}, {5, 6}, true);
  std::vector<Parameter*> trainable = model.trainable_params();
  adam_step(trainable, 1e-2, 1);

  for (std::size_t i = 0; i < base_names.size(); ++i) {
    CAPTURE(base_names[i]);
    CHECK(matrices_equal(model.param(base_names[i]).value, base_before[i]));
  }
  // B receives gradient through x*A (A is gaussian), so it must move
  CHECK_FALSE(matrices_equal(model.param("adapter.enc.0.self.q.B").value, b_before));
}

TEST_CASE("adapter gradients match central finite differences") {
  MicroTransformer model = tiny_model(17);
  AdapterSpec spec;
  spec.rank = 3;
  model.attach_adapter(spec, 18);
  // nonzero A and B so every adapter coordinate has signal
  for (Parameter* p : model.adapter_params()) {
    Rng prng(p->name.size() * 1337 + 11);
    p->value = Matrix::gaussian(p->value.rows, p->value.cols, prng, 0.05);
  }

  std::vector<int> src{4, 5, 6, 7, WordTokenizer::kEos};
  std::vector<int> tgt{5, 6, 7};
  model.zero_grads();
  model.sequence_loss(src, tgt, true);

  Rng pick(31);
  std::vector<Parameter*> adapters = model.adapter_params();
  int checked = 0;
  double worst = 0.0;
  while (checked < 24) {
    Parameter* p = adapters[pick.next_below(adapters.size())];
    std::size_t at = pick.next_below(p->value.data.size());
    double analytic = p->grad.data[at];
    double eps = 1e-5;
    double saved = p->value.data[at];
    p->value.data[at] = saved + eps;
    double up = model.sequence_loss(src, tgt, false);
    p->value.data[at] = saved - eps;
    double down = model.sequence_loss(src, tgt, false);
    p->value.data[at] = saved;
    double numeric = (up - down) / (2 * eps);
    double rel = std::fabs(analytic - numeric) /
                 std::max({1e-8, std::fabs(analytic), std::fabs(numeric)});
    worst = std::max(worst, rel);
    ++checked;
  }
  CHECK(worst <= 1e-4);
}

// ---------------------------------------------------------------------------
// Training behavior

namespace {

PairDataset tiny_copy_set(int n) {
  std::vector<std::string> texts;
  const std::vector<std::string> bank = {
      "the boy takes a cookie", "the girl washes the dishes",
      "water runs over", "the dog watches the jar"};
  for (int i = 0; i < n; ++i) texts.push_back(bank[static_cast<std::size_t>(i) % bank.size()]);
  return copy_pairs(texts);
}

}  // namespace

TEST_CASE("the copy task is learnable: validation loss falls") {
  MicroTransformer model = tiny_model(5, 24, 48);
  PairDataset pairs = tiny_copy_set(64);
  TrainConfig config;
  config.max_epochs = 6;
  config.learning_rate = 3e-3;
  config.batch_size = 8;
  config.patience = 10;
  config.seed = 1;
  TrainReport report = train(model, pairs, config, tiny_copy_set(8));
  REQUIRE(report.epochs.size() >= 2);
  CHECK(report.epochs.back().val_loss < report.epochs.front().val_loss);
  CHECK(report.epochs[1].val_loss < report.epochs[0].val_loss);
}

TEST_CASE("patience 1 with a contradictory validation set stops early") {
  MicroTransformer model = tiny_model(6, 24, 48);
  PairDataset pairs = tiny_copy_set(32);
  // validation demands the opposite mapping, so it degrades as training fits
  PairDataset val;
  ObfuscationPair p;
  p.original.id = "v0";
  p.original.text = "the boy takes a cookie";
  p.obfuscated = "dishes jar watches dog the";
  val.pairs.push_back(p);
  val.recompute_stats();

  TrainConfig config;
  config.max_epochs = 20;
  config.learning_rate = 3e-3;
  config.patience = 1;
  config.seed = 2;
  TrainReport report = train(model, pairs, config, val);
  CHECK(report.early_stopped);
  CHECK(static_cast<int>(report.epochs.size()) < config.max_epochs);
}

TEST_CASE("updated-parameter count equals the adapter formula") {
  MicroTransformer model = tiny_model();
  AdapterSpec spec;
  spec.rank = 4;
  model.attach_adapter(spec);
  std::size_t expected = adapter_param_count(spec, model.matrix_registry());

  PairDataset pairs = tiny_copy_set(8);
  TrainConfig config;
  config.max_epochs = 1;
  config.learning_rate = 1e-3;
  config.seed = 3;
  TrainReport report = train(model, pairs, config, pairs);
  CHECK(report.updated_parameters == expected);
}

TEST_CASE("full fine-tuning updates the whole model") {
  MicroTransformer model = tiny_model();
  PairDataset pairs = tiny_copy_set(8);
  TrainConfig config;
  config.max_epochs = 1;
  config.learning_rate = 1e-3;
  TrainReport report = train(model, pairs, config, pairs);
  CHECK(report.updated_parameters == model.total_param_count());
}

TEST_CASE("empty trainset is rejected") {
  MicroTransformer model = tiny_model();
  PairDataset pairs;
  pairs.recompute_stats();
  TrainConfig config;
  CHECK_THROWS_AS(train(model, pairs, config, pairs), Error);
}

// ---------------------------------------------------------------------------
// Decoding

TEST_CASE("beam decode is deterministic") {
  MicroTransformer model = tiny_model(21, 24, 48);
  DecodeConfig config;
  config.beams = 4;
  config.max_length = 8;
  std::string a = decode(model, "the boy takes a cookie", config);
  std::string b = decode(model, "the boy takes a cookie", config);
  CHECK(a == b);
}

TEST_CASE("sampling at vanishing temperature equals greedy decode") {
  MicroTransformer model = tiny_model(22, 24, 48);
  DecodeConfig greedy;
  greedy.mode = DecodeMode::BEAM;
  greedy.beams = 1;
  greedy.max_length = 6;
  DecodeConfig frozen;
  frozen.mode = DecodeMode::SAMPLE;
  frozen.temperature = 1e-9;
  frozen.max_length = 6;
  frozen.seed = 9;
  CHECK(decode(model, "the girl washes the dishes", frozen) ==
        decode(model, "the girl washes the dishes", greedy));
}

TEST_CASE("sampling entropy rises with temperature") {
  MicroTransformer model = tiny_model(23, 24, 48);
  // a lightly trained model keeps soft distributions
  PairDataset pairs = tiny_copy_set(24);
  TrainConfig tc;
  tc.max_epochs = 3;
  tc.learning_rate = 2e-3;
  tc.seed = 4;
  train(model, pairs, tc, pairs);

  auto mean_entropy = [&](double temperature) {
    DecodeConfig dc;
    dc.mode = DecodeMode::SAMPLE;
    dc.temperature = temperature;
    dc.max_length = 6;
    Rng rng(1234);
    double total = 0.0;
    int steps = 0;
    for (int i = 0; i < 200; ++i) {
      SampleTrace trace = sample_trace(model, "the boy takes a cookie", dc, rng);
      for (double h : trace.step_entropies) {
        total += h;
        ++steps;
      }
    }
    return total / std::max(1, steps);
  };
  CHECK(mean_entropy(2.0) > mean_entropy(1.0));
}

// ---------------------------------------------------------------------------
// Checkpoints

TEST_CASE("checkpoints round-trip bit-exactly, adapters included") {
  namespace fs = std::filesystem;
  MicroTransformer model = tiny_model(31, 24, 48);
  AdapterSpec spec;
  spec.rank = 4;
  model.attach_adapter(spec);
  for (Parameter* p : model.adapter_params()) {
    Rng prng(7);
    p->value = Matrix::gaussian(p->value.rows, p->value.cols, prng, 0.05);
  }
  std::string dir = (fs::temp_directory_path() / "didots_ckpt_test").string();
  fs::remove_all(dir);
  save_checkpoint(model, dir, {{"note", "unit-test"}});
  MicroTransformer loaded = load_checkpoint(dir);
  CHECK(loaded.has_adapter());
  for (const auto& name : model.param_names()) {
    CAPTURE(name);
    CHECK(matrices_equal(loaded.param(name).value, model.param(name).value));
  }
  CHECK(checkpoint_metadata(dir).at("note") == "unit-test");

  std::vector<int> src{4, 5, WordTokenizer::kEos};
  std::vector<int> tgt{4, 5};
  CHECK(matrices_equal(loaded.forward_logits(src, tgt), model.forward_logits(src, tgt)));
}
