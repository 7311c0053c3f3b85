#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "sitewatch/eval.hpp"

using namespace sitewatch;

namespace {

BBox random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> center(0.0, 1.0);
  std::uniform_real_distribution<double> size(0.05, 0.4);
  return BBox(center(rng), center(rng), size(rng), size(rng));
}

std::vector<Detection> random_predictions(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  std::uniform_int_distribution<int> category(0, 9);
  std::vector<Detection> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.emplace_back(category_from_index(category(rng)), random_box(rng), conf(rng));
  }
  return out;
}

std::vector<GroundTruthBox> random_ground_truth(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> category(0, 9);
  std::vector<GroundTruthBox> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.emplace_back(category_from_index(category(rng)), random_box(rng));
  }
  return out;
}

}  // namespace

static void BM_iou(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const BBox a = random_box(rng);
  const BBox b = random_box(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(iou(a, b));
  }
}
BENCHMARK(BM_iou);

static void BM_match_image(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto preds = random_predictions(rng, static_cast<int>(state.range(0)));
  const auto gts = random_ground_truth(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval::match_image(preds, gts, 0.5));
  }
}
BENCHMARK(BM_match_image)->Arg(20)->Arg(100);

static void BM_ap50_pooled(benchmark::State& state) {
  std::mt19937_64 rng(3);
  eval::Pooled pooled;
  for (int img = 0; img < static_cast<int>(state.range(0)); ++img) {
    pooled.add_image(random_predictions(rng, 20), random_ground_truth(rng, 20), 0.5);
  }
  for (auto _ : state) {
    for (Category c : all_categories()) {
      benchmark::DoNotOptimize(eval::ap50(pooled, c));
    }
  }
}
BENCHMARK(BM_ap50_pooled)->Arg(10)->Arg(100);

static void BM_confidence_sweep(benchmark::State& state) {
  std::mt19937_64 rng(4);
  eval::Pooled pooled;
  for (int img = 0; img < 50; ++img) {
    pooled.add_image(random_predictions(rng, 20), random_ground_truth(rng, 20), 0.5);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval::confidence_sweep(pooled));
  }
}
BENCHMARK(BM_confidence_sweep);

BENCHMARK_MAIN();
