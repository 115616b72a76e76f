#include <benchmark/benchmark.h>

#include <random>

#include "oracular/cvrnn.hpp"
#include "oracular/training.hpp"

using namespace oracular;
using namespace oracular::cvrnn;

namespace {

Batch random_batch(const Architecture& arch, std::mt19937_64& rng) {
  std::bernoulli_distribution on(0.02);
  Batch batch(arch.seq_len, Frame(arch.frame_size()));
  for (auto& frame : batch) {
    for (double& v : frame) v = on(rng) ? 1.0 : 0.0;
  }
  return batch;
}

void BM_Forward(benchmark::State& state) {
  const Architecture arch;
  std::mt19937_64 rng(1);
  const auto params = CvrnnParams::initialize(arch, rng);
  const auto batch = random_batch(arch, rng);
  const auto noise = Noise::sample(arch, 1, 0.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(elbo_loss(params, batch, noise));
}
BENCHMARK(BM_Forward)->Unit(benchmark::kMillisecond);

void BM_Backprop(benchmark::State& state) {
  const Architecture arch;
  std::mt19937_64 rng(2);
  const auto params = CvrnnParams::initialize(arch, rng);
  const auto batch = random_batch(arch, rng);
  const auto noise = Noise::sample(arch, 1, 0.3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(backprop(params, batch, noise));
}
BENCHMARK(BM_Backprop)->Unit(benchmark::kMillisecond);

void BM_Generate(benchmark::State& state) {
  const Architecture arch;
  std::mt19937_64 rng(3);
  const auto params = CvrnnParams::initialize(arch, rng);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate(params, 8, seed++));
}
BENCHMARK(BM_Generate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
