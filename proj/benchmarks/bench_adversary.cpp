#include <benchmark/benchmark.h>

#include "didots/adversary.hpp"
#include "didots/corpus.hpp"
#include "didots/tfidf.hpp"

using namespace didots;

static void BM_TfidfFitTransform(benchmark::State& state) {
  Corpus corpus = synth_fixture(7, static_cast<std::size_t>(state.range(0)));
  std::vector<std::string> texts;
  for (const auto& s : corpus.samples()) texts.push_back(s.text);
  for (auto _ : state) {
    TfidfVectorizer v;
    benchmark::DoNotOptimize(v.fit_transform(texts));
  }
}
BENCHMARK(BM_TfidfFitTransform)->Arg(25)->Arg(50);

static void BM_KernelAdversaryTrain(benchmark::State& state) {
  Corpus train = synth_fixture(7, static_cast<std::size_t>(state.range(0)))
                     .filter_split(Split::TRAIN);
  AdversaryConfig config;
  config.kind = AdversaryKind::KERNEL;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_adversary(config, train));
  }
}
BENCHMARK(BM_KernelAdversaryTrain)->Arg(25)->Arg(50);
