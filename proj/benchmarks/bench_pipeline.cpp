#include <benchmark/benchmark.h>

#include <cmath>

#include "sitewatch/bus.hpp"
#include "sitewatch/pipeline.hpp"
#include "sitewatch/replay.hpp"
#include "sitewatch/sim.hpp"

using namespace sitewatch;

namespace {

FramePacket crowded_frame(std::int64_t f, double fps, int subjects) {
  FramePacket frame{f, static_cast<double>(f) / fps, {}};
  for (int s = 0; s < subjects; ++s) {
    const double cx = 0.1 + 0.8 * s / std::max(1, subjects - 1);
    const BBox person(cx, 0.5, 0.12, 0.4);
    frame.detections.emplace_back(Category::Person, person, 0.95);
    frame.detections.emplace_back(s % 2 ? Category::NoHardhat : Category::Hardhat,
                                  BBox(cx, 0.34, 0.05, 0.06), 0.9);
    frame.detections.emplace_back(s % 2 ? Category::NoSafetyVest : Category::SafetyVest,
                                  BBox(cx, 0.52, 0.09, 0.12), 0.9);
  }
  return frame;
}

}  // namespace

static void BM_bus_publish_pump(benchmark::State& state) {
  for (auto _ : state) {
    state.PauseTiming();
    bus::Bus bus;
    const auto in = bus.create_topic("in", bus::PayloadKind::FramePacket, 64);
    const auto out = bus.create_topic("out", bus::PayloadKind::FramePacket, 64);
    bus.add_node("relay", {in}, {out}, [&](bus::TopicId, const bus::Payload& p) {
      return std::vector<bus::Publication>{{out, p}};
    });
    bus.subscribe(out);
    state.ResumeTiming();

    for (int i = 0; i < 1000; ++i) {
      bus.publish(in, crowded_frame(i, 30.0, 2));
      bus.pump();
    }
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_bus_publish_pump)->Unit(benchmark::kMillisecond);

static void BM_pipeline_frames(benchmark::State& state) {
  const int subjects = static_cast<int>(state.range(0));
  for (auto _ : state) {
    state.PauseTiming();
    pipeline::Pipeline pipe((pipeline::PipelineConfig()));
    state.ResumeTiming();
    for (int f = 0; f < 300; ++f) {
      pipe.feed(crowded_frame(f, 30.0, subjects));
    }
  }
  state.SetItemsProcessed(state.iterations() * 300);
}
BENCHMARK(BM_pipeline_frames)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_replay_roundtrip(benchmark::State& state) {
  std::vector<FramePacket> frames;
  for (int f = 0; f < 300; ++f) frames.push_back(crowded_frame(f, 30.0, 6));
  const std::string text = io::format_replay(frames);
  for (auto _ : state) {
    benchmark::DoNotOptimize(io::parse_replay_text(text));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_replay_roundtrip)->Unit(benchmark::kMillisecond);

static void BM_trial_noiseless(benchmark::State& state) {
  const auto scenario = sim::scenario_for(5, 10.0, 5.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sim::run_trial(scenario, sim::NoiseModel::none(), sim::TrialParams{}, 7));
  }
}
BENCHMARK(BM_trial_noiseless)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
