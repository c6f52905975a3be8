#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "quasim/born.hpp"
#include "quasim/channel.hpp"
#include "quasim/projection.hpp"
#include "quasim/trajectory.hpp"

using namespace quasim;

namespace {

PowerSpectrum random_spectrum(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PowerSpectrum s;
  s.window = Window{0, 1};
  s.per_basis_power.resize(dim);
  double total = 0.0;
  for (auto& p : s.per_basis_power) total += (p = unit(rng));
  for (auto& p : s.per_basis_power) p /= total;
  s.total_power = 1.0;
  return s;
}

}  // namespace

static void BM_PowerSpectrum(benchmark::State& state) {
  const auto samples = static_cast<std::size_t>(state.range(0));
  const Trajectory traj = generate(RandomFast{0.02}, 4, samples, 0.01, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(power_spectrum(traj, Window{0, samples}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(samples));
}
BENCHMARK(BM_PowerSpectrum)->Arg(256)->Arg(1024)->Arg(4096);

static void BM_MaximalBrute(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto dim = static_cast<std::size_t>(state.range(0));
  std::vector<PowerSpectrum> spectra;
  for (int i = 0; i < 32; ++i) spectra.push_back(random_spectrum(rng, dim));
  ProjectionConfig cfg;
  std::size_t i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        maximal_from_spectrum(spectra[i++ % spectra.size()], cfg));
}
BENCHMARK(BM_MaximalBrute)->Arg(4)->Arg(6)->Arg(8)->Arg(10);

static void BM_GreedyPartition(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto dim = static_cast<std::size_t>(state.range(0));
  std::vector<PowerSpectrum> spectra;
  for (int i = 0; i < 32; ++i) spectra.push_back(random_spectrum(rng, dim));
  std::size_t i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(greedy_partition(spectra[i++ % spectra.size()], 1.0));
}
BENCHMARK(BM_GreedyPartition)->Arg(4)->Arg(6)->Arg(8)->Arg(10)->Arg(24);

static void BM_MartingaleTrace(benchmark::State& state) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        martingale_power_trace({0.4, 0.3, 0.2, 0.1}, steps, seed++));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(steps));
}
BENCHMARK(BM_MartingaleTrace)->Arg(256)->Arg(4096);

static void BM_MonteCarlo(benchmark::State& state) {
  const auto trials = static_cast<std::size_t>(state.range(0));
  const PreparedSystem sys{
      {Complex(0.7, 0), Complex(0.5, 0), Complex(0.5099019513592785, 0)}, {}};
  ProjectionConfig cfg;
  MonteCarloOptions options;
  options.step_budget = 256;
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        monte_carlo(sys, {1, 2, 3}, trials, seed++, cfg, options));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trials));
}
BENCHMARK(BM_MonteCarlo)->Arg(100)->Arg(1000);

static void BM_ChannelDecode(benchmark::State& state) {
  const auto ticks = state.range(0);
  const Agent alice = make_alice(3);
  const auto noise = make_noise_agents(3, 3);
  const Criterion crit = make_language_criterion(kAliceTag);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const ChannelResult run = run_channel(alice, noise, ticks, seed++);
    benchmark::DoNotOptimize(decode(run.stream, crit));
  }
  state.SetItemsProcessed(state.iterations() * ticks);
}
BENCHMARK(BM_ChannelDecode)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
