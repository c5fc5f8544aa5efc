#include <benchmark/benchmark.h>

#include "didots/metrics.hpp"

using namespace didots;

namespace {
const std::string kRef = "and there's a tree out there somewhere that you can see part of the trunk";
const std::string kHyp = "outside you can see a tree with some of its trunk and leaves visible";
}  // namespace

static void BM_Meteor(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(meteor(kRef, kHyp));
  }
}
BENCHMARK(BM_Meteor);

static void BM_EditOps(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(edit_ops(kRef, kHyp));
  }
}
BENCHMARK(BM_EditOps);

static void BM_LexicalSimilarity(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(lexical_similarity(kRef, kHyp));
  }
}
BENCHMARK(BM_LexicalSimilarity);

static void BM_BagEmbeddingSimilarity(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(bag_embedding_similarity(kRef, kHyp));
  }
}
BENCHMARK(BM_BagEmbeddingSimilarity);
