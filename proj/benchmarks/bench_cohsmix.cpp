#include <benchmark/benchmark.h>

#include "cohsmix/inference.hpp"
#include "cohsmix/metrics.hpp"
#include "cohsmix/simulator.hpp"

using namespace cohsmix;

namespace {

SimulatedData instance(std::size_t n, std::size_t q) {
  AffiliationSpec spec;
  spec.n = n;
  spec.q = q;
  spec.seed = 1;
  return generate(spec);
}

void BM_EStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SimulatedData d = instance(n, 3);
  Rng rng(2);
  const Responsibilities tau0 = init_responsibilities(d.graph, d.features, 3, InitStrategy::random_dirichlet, rng);
  const ModelParams params = m_step(d.graph, d.features, tau0);
  const EMConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(e_step(d.graph, d.features, params, tau0, cfg));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EStep)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

void BM_MStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SimulatedData d = instance(n, 3);
  Rng rng(2);
  const Responsibilities tau = init_responsibilities(d.graph, d.features, 3, InitStrategy::random_dirichlet, rng);
  for (auto _ : state) benchmark::DoNotOptimize(m_step(d.graph, d.features, tau));
}
BENCHMARK(BM_MStep)->RangeMultiplier(2)->Range(64, 1024);

void BM_Fit(benchmark::State& state) {
  const SimulatedData d = instance(150, static_cast<std::size_t>(state.range(0)));
  EMConfig cfg;
  cfg.n_restarts = 1;
  for (auto _ : state) benchmark::DoNotOptimize(fit(d.graph, d.features, static_cast<std::size_t>(state.range(0)), cfg));
}
BENCHMARK(BM_Fit)->DenseRange(2, 6, 2)->Unit(benchmark::kMillisecond);

void BM_Ari(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  std::vector<int> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = static_cast<int>(uniform_index(rng, 5));
    b[i] = static_cast<int>(uniform_index(rng, 7));
  }
  for (auto _ : state) benchmark::DoNotOptimize(adjusted_rand_index(a, b));
}
BENCHMARK(BM_Ari)->RangeMultiplier(8)->Range(64, 32768);

}  // namespace

BENCHMARK_MAIN();
