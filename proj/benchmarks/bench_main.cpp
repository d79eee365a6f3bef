// Microbenchmarks for the hot paths: one SGD step in both modes, negative
// sampling, representation composition, nearest-neighbor scan, and pearson.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hanbias/embedding.hpp"
#include "hanbias/rng.hpp"
#include "hanbias/stats.hpp"
#include "hanbias/train_kernel.hpp"
#include "hanbias/trainer.hpp"
#include "hanbias/vocabulary.hpp"

namespace {

hanbias::Vocabulary synthetic_vocab(std::size_t n_words) {
  std::vector<hanbias::VocabEntry> entries;
  std::uint64_t total = 0;
  for (std::size_t w = 0; w < n_words; ++w) {
    const std::uint64_t count = 5 + (n_words - w);
    entries.push_back({"w" + std::to_string(w), count});
    total += count;
  }
  return hanbias::Vocabulary::from_entries(std::move(entries), total, 1,
                                           false);
}

hanbias::EmbeddingModel synthetic_model(hanbias::Mode mode, std::int32_t dim,
                                        std::size_t n_words) {
  auto vocab = synthetic_vocab(n_words);
  auto chars = mode == hanbias::Mode::kCwe
                   ? hanbias::CharInventory::extract(vocab)
                   : hanbias::CharInventory{};
  return hanbias::EmbeddingModel::init(mode, dim, std::move(vocab),
                                       std::move(chars), 42);
}

hanbias::TrainingStep synthetic_step(std::size_t n_words) {
  hanbias::TrainingStep step;
  step.center = 0;
  step.context = {1, 2, 3, 4};
  step.negatives = {5, 6, 7, 8, 9};
  for (auto& id : step.negatives) id %= std::int32_t(n_words);
  step.lr = 0.025;
  return step;
}

void BM_SgdStep(benchmark::State& state, hanbias::Mode mode) {
  const auto dim = std::int32_t(state.range(0));
  auto model = synthetic_model(mode, dim, 1000);
  const auto step = synthetic_step(1000);
  for (auto _ : state) {
    hanbias::sgd_step(model, step);
    benchmark::DoNotOptimize(model.mutable_words().data());
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()));
}

void BM_SgdStepCbow(benchmark::State& state) {
  BM_SgdStep(state, hanbias::Mode::kCbow);
}
void BM_SgdStepCwe(benchmark::State& state) {
  BM_SgdStep(state, hanbias::Mode::kCwe);
}
BENCHMARK(BM_SgdStepCbow)->Arg(100)->Arg(300);
BENCHMARK(BM_SgdStepCwe)->Arg(100)->Arg(300);

void BM_NegativeSample(benchmark::State& state) {
  const auto vocab = synthetic_vocab(std::size_t(state.range(0)));
  const hanbias::UnigramTable table(vocab);
  hanbias::Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(table.sample(rng));
  state.SetItemsProcessed(std::int64_t(state.iterations()));
}
BENCHMARK(BM_NegativeSample)->Arg(1000)->Arg(100000);

void BM_Compose(benchmark::State& state) {
  const auto model =
      synthetic_model(hanbias::Mode::kCwe, std::int32_t(state.range(0)), 1000);
  std::int32_t id = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hanbias::compose(model, id));
    id = (id + 1) % 1000;
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()));
}
BENCHMARK(BM_Compose)->Arg(100)->Arg(300);

void BM_Nearest(benchmark::State& state) {
  const auto model = synthetic_model(hanbias::Mode::kCbow, 100,
                                     std::size_t(state.range(0)));
  const auto query = hanbias::word_representation(model, 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(hanbias::nearest(model, query, 10, {0}));
  state.SetItemsProcessed(std::int64_t(state.iterations()));
}
BENCHMARK(BM_Nearest)->Arg(1000)->Arg(10000);

void BM_Pearson(benchmark::State& state) {
  const std::size_t n = std::size_t(state.range(0));
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = uni(gen);
    y[i] = uni(gen);
  }
  for (auto _ : state) benchmark::DoNotOptimize(hanbias::pearson(x, y));
  state.SetItemsProcessed(std::int64_t(state.iterations() * n));
}
BENCHMARK(BM_Pearson)->Arg(100)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
