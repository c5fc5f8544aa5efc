#include <benchmark/benchmark.h>

#include "didots/backend.hpp"
#include "didots/decode.hpp"

using namespace didots;

namespace {

WordTokenizer bench_tokenizer() {
  return WordTokenizer::fit({"the boy takes a cookie from the jar",
                             "the girl washes the dishes by the window",
                             "uh um the water runs over the sink"});
}

MicroTransformer bench_model(bool with_adapter) {
  MicroConfig config;
  config.seed = 11;
  MicroTransformer model(bench_tokenizer(), config);
  if (with_adapter) {
    AdapterSpec spec;
    model.attach_adapter(spec);
  }
  return model;
}

const std::vector<int> kSrc{4, 5, 6, 7, 8, 9, WordTokenizer::kEos};
const std::vector<int> kTgt{4, 5, 6, 7, 8};

}  // namespace

static void BM_ForwardBase(benchmark::State& state) {
  MicroTransformer model = bench_model(false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.forward_logits(kSrc, kTgt));
  }
}
BENCHMARK(BM_ForwardBase);

static void BM_ForwardLora(benchmark::State& state) {
  MicroTransformer model = bench_model(true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.forward_logits(kSrc, kTgt));
  }
}
BENCHMARK(BM_ForwardLora);

static void BM_TrainStep(benchmark::State& state) {
  MicroTransformer model = bench_model(true);
  std::vector<Parameter*> trainable = model.trainable_params();
  std::size_t step = 0;
  for (auto _ : state) {
    model.zero_grads();
    benchmark::DoNotOptimize(model.sequence_loss(kSrc, kTgt, true));
    adam_step(trainable, 1e-3, ++step);
  }
}
BENCHMARK(BM_TrainStep);

static void BM_MergeAdapter(benchmark::State& state) {
  for (auto _ : state) {
    state.PauseTiming();
    MicroTransformer model = bench_model(true);
    state.ResumeTiming();
    model.merge_adapter();
    benchmark::DoNotOptimize(model);
  }
}
BENCHMARK(BM_MergeAdapter);

static void BM_BeamDecode(benchmark::State& state) {
  MicroTransformer model = bench_model(false);
  DecodeConfig config;
  config.beams = static_cast<int>(state.range(0));
  config.max_length = 12;
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode(model, "the boy takes a cookie", config));
  }
}
BENCHMARK(BM_BeamDecode)->Arg(1)->Arg(4);
