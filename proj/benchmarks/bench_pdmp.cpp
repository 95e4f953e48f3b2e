#include <benchmark/benchmark.h>

#include "popot/pdmp.hpp"

using namespace popot;

namespace {

SimConfig config(std::size_t n) {
  SimConfig cfg;
  cfg.n_particles = n;
  cfg.horizon = 3.0;
  cfg.checkpoints = uniform_checkpoints(3.0, 10);
  cfg.seed = 1;
  return cfg;
}

void BM_RenewalCoupled(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Renewal m(GrowthFunction::constant(1.0), power_rate(1, 1, 1), BirthLaw(Law::uniform(0, 1)), 1.0);
  std::vector<std::pair<Age, Age>> pairs;
  Stream rng = stream_for(2, 0);
  for (std::size_t k = 0; k < n; ++k) pairs.emplace_back(Age{3 * uniform01(rng)}, Age{1 + 3 * uniform01(rng)});
  for (auto _ : state) benchmark::DoNotOptimize(simulate_coupled(m, config(n), pairs).stats.back().mean_cost);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RenewalCoupled)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_GrowthFragmentationPopulation(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const GrowthFragmentation m(GrowthFunction::constant(1.0), power_rate(1, 1, 1),
                              FragmentRatio(Law::uniform(0, 1)), 0.45);
  const auto init = EmpiricalMeasure<Age>::uniform({{0.5}, {1.0}, {2.0}});
  for (auto _ : state) benchmark::DoNotOptimize(simulate_population(m, config(n), init).size());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GrowthFragmentationPopulation)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_SexualCoupled(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Sexual m(2, MatingMix(Law::uniform(0, 1), 1.0));
  std::vector<std::pair<Trait, Trait>> pairs;
  Stream rng = stream_for(3, 0);
  for (std::size_t k = 0; k < n; ++k)
    pairs.emplace_back(Trait{Vec{uniform01(rng), uniform01(rng)}}, Trait{Vec{2 * uniform01(rng), 2 * uniform01(rng)}});
  for (auto _ : state) benchmark::DoNotOptimize(simulate_coupled(m, config(n), pairs).stats.back().mean_cost);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SexualCoupled)->Arg(3000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
