#include <benchmark/benchmark.h>

#include <random>

#include "oracular/features.hpp"
#include "oracular/midi.hpp"
#include "oracular/oracle.hpp"

using namespace oracular;

namespace {

// A 32-bar roll: a random 2-bar phrase repeated, with light per-step noise.
midi::PianoRoll thirty_two_bars(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution on(3.0 / 128.0), flip(0.01);
  midi::PianoRoll roll(256);
  for (std::size_t s = 0; s < 16; ++s) {
    for (int p = 0; p < midi::kNumPitches; ++p) {
      if (!on(rng)) continue;
      for (std::size_t r = s; r < 256; r += 16) roll.set(r, p);
    }
  }
  for (std::size_t s = 0; s < 256; ++s) {
    if (flip(rng)) roll.set(s, static_cast<int>(rng() % midi::kNumPitches));
  }
  return roll;
}

void BM_Sweep(benchmark::State& state) {
  const auto frames = features::chroma_from_piano_roll(thirty_two_bars(1), static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(oracle::sweep_threshold(frames));
  state.SetLabel(std::to_string(frames.frames.size()) + " frames");
}
BENCHMARK(BM_Sweep)->Arg(4)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BuildOracle(benchmark::State& state) {
  const auto frames = features::chroma_from_piano_roll(thirty_two_bars(2));
  const oracle::DistanceMatrix dist(frames);
  const auto candidates = dist.candidates();
  const double theta = candidates[candidates.size() / 4];
  for (auto _ : state) benchmark::DoNotOptimize(oracle::build_oracle(dist, theta));
}
BENCHMARK(BM_BuildOracle)->Unit(benchmark::kMicrosecond);

void BM_Motifs(benchmark::State& state) {
  const auto frames = features::chroma_from_piano_roll(thirty_two_bars(3));
  const auto sweep = oracle::sweep_threshold(frames);
  const auto fo = oracle::build_oracle(frames, sweep.theta_star);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::find_motifs(fo, 4));
}
BENCHMARK(BM_Motifs)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
