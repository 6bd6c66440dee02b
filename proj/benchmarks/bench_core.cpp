#include <benchmark/benchmark.h>

#include <cmath>

#include "kappadyn/analysis.hpp"

namespace {

using namespace kappadyn;

PhysicalParams quantum_params() {
  PhysicalParams p;
  p.hbar = 1.0;
  p.mass = 1.0;
  p.kappa = 1.0;
  return p;
}

void bm_step_unified(benchmark::State& bench) {
  const int n = static_cast<int>(bench.range(0));
  const PhaseSpaceGrid grid = build_grid(n, n, -6.0, 6.0, -6.0, 6.0);
  const PhysicalParams params = quantum_params();
  const Potential pot = Potential::harmonic(1.0, 1.0);
  PhaseSpaceState state = gaussian_state(1.0, 0.5, std::sqrt(0.5), params, grid, 0);
  for (auto _ : bench) {
    state = step_unified(state, grid, pot, params, 0.01);
    benchmark::DoNotOptimize(state.field.data());
  }
  bench.SetItemsProcessed(bench.iterations() * grid.size());
}
BENCHMARK(bm_step_unified)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void bm_step_kvn(benchmark::State& bench) {
  const int n = static_cast<int>(bench.range(0));
  const PhaseSpaceGrid grid = build_grid(n, n, -6.0, 6.0, -6.0, 6.0);
  const PhysicalParams params = quantum_params();
  const Potential pot = Potential::morse(20.0, 0.16);
  PhaseSpaceState state = gaussian_state(1.0, 0.0, std::sqrt(0.5), params, grid, 0);
  for (auto _ : bench) {
    state = step_kvn(state, grid, pot, params, 0.01);
    benchmark::DoNotOptimize(state.field.data());
  }
  bench.SetItemsProcessed(bench.iterations() * grid.size());
}
BENCHMARK(bm_step_kvn)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void bm_wigner_from_pure(benchmark::State& bench) {
  const int n = static_cast<int>(bench.range(0));
  const PhaseSpaceGrid grid = build_grid(n, n, -6.0, 6.0, -6.0, 6.0);
  const PhysicalParams params = quantum_params();
  const ConfigurationState phi =
      gaussian_configuration(0.0, 0.0, std::sqrt(0.5), params, grid, 1);
  for (auto _ : bench) {
    PhaseSpaceState w = wigner_from_pure(phi, grid);
    benchmark::DoNotOptimize(w.field.data());
  }
}
BENCHMARK(bm_wigner_from_pure)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void bm_negativity(benchmark::State& bench) {
  const int n = static_cast<int>(bench.range(0));
  const PhaseSpaceGrid grid = build_grid(n, n, -6.0, 6.0, -6.0, 6.0);
  const PhaseSpaceState state =
      gaussian_state(0.0, 0.0, std::sqrt(0.5), quantum_params(), grid, 1);
  for (auto _ : bench) {
    const NegativityMetrics m = negativity(state, grid);
    benchmark::DoNotOptimize(m.n_minus);
  }
  bench.SetItemsProcessed(bench.iterations() * grid.size());
}
BENCHMARK(bm_negativity)->Arg(512)->Unit(benchmark::kMicrosecond);

void bm_moment(benchmark::State& bench) {
  const int n = static_cast<int>(bench.range(0));
  const PhaseSpaceGrid grid = build_grid(n, n, -6.0, 6.0, -6.0, 6.0);
  const PhaseSpaceState state =
      gaussian_state(1.0, 0.5, std::sqrt(0.5), quantum_params(), grid, 0);
  const ObservableSpec obs{Observable1D::square(), Observable1D::identity()};
  for (auto _ : bench) {
    const ExpectationResult r = expectation(state, grid, obs);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(bm_moment)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
