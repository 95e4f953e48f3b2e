#include <benchmark/benchmark.h>

#include "popot/cost.hpp"
#include "popot/transport.hpp"

using namespace popot;

namespace {

EmpiricalMeasure<Age> cloud(std::size_t n, std::uint64_t seed) {
  Stream rng = stream_for(seed, 0);
  std::vector<Age> atoms;
  for (std::size_t k = 0; k < n; ++k) atoms.push_back({10 * uniform01(rng)});
  return EmpiricalMeasure<Age>::uniform(std::move(atoms));
}

EmpiricalMeasure<Age> weighted_cloud(std::size_t n, std::uint64_t seed) {
  Stream rng = stream_for(seed, 0);
  std::vector<Age> atoms;
  std::vector<double> w;
  double total = 0;
  for (std::size_t k = 0; k < n; ++k) {
    atoms.push_back({10 * uniform01(rng)});
    w.push_back(0.5 + uniform01(rng));
    total += w.back();
  }
  for (double& v : w) v /= total;
  return EmpiricalMeasure<Age>(std::move(atoms), std::move(w));
}

void BM_Assignment(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto mu = cloud(n, 1), nu = cloud(n, 2);
  const auto cost = CostFunction::trunc_abs(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(transport_cost(mu, nu, cost).cost);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Assignment)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

void BM_NetworkSimplex(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto mu = weighted_cloud(n, 3), nu = weighted_cloud(n, 4);
  const auto cost = CostFunction::trunc_abs(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(transport_cost(mu, nu, cost).cost);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NetworkSimplex)->RangeMultiplier(2)->Range(64, 512)->Complexity();

void BM_BruteForce(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto mu = cloud(n, 5), nu = cloud(n, 6);
  const auto cost = CostFunction::trunc_abs(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_cost(mu, nu, cost));
}
BENCHMARK(BM_BruteForce)->DenseRange(4, 8, 2);

}  // namespace

BENCHMARK_MAIN();
