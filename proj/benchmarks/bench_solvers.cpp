#include <benchmark/benchmark.h>

#include <cmath>

#include "tfcond/dynamics.hpp"
#include "tfcond/groundstate.hpp"

using namespace tfcond;

static void BM_GroundState3D(benchmark::State& state) {
  const double g = static_cast<double>(state.range(0));
  const InteractionSpec v;
  const TrapSpec trap;
  const double G = g * v.integral(3);
  const Grid grid = make_grid(3, 32, default_half_width(trap, G));
  for (auto _ : state) {
    const GroundStateResult r = gp_minimize(grid, trap, G);
    state.counters["iterations"] = r.iterations;
    benchmark::DoNotOptimize(r.mu_gp);
  }
}
BENCHMARK(BM_GroundState3D)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_Spectrum3D(benchmark::State& state) {
  const TrapSpec trap;
  const double G = 10 * InteractionSpec{}.integral(3);
  const Grid grid = make_grid(3, 32, default_half_width(trap, G));
  const GroundStateResult gs = gp_minimize(grid, trap, G);
  for (auto _ : state) benchmark::DoNotOptimize(hgp_spectrum(grid, trap, G, gs.phi, 2).gap);
}
BENCHMARK(BM_Spectrum3D)->Unit(benchmark::kMillisecond);

static void BM_StrangSteps(benchmark::State& state) {
  const Grid grid = make_grid(1, 4096, 16.0);
  Field phi = Field::from_function(grid, [](const std::array<double, 3>& x) {
    return cplx(std::exp(-0.5 * x[0] * x[0]), 0);
  });
  normalize(phi);
  const Nonlinearity nl = state.range(0) == 0 ? Nonlinearity::cubic(4.0)
                                              : Nonlinearity::hartree(grid, InteractionSpec{}, 4.0, 1024);
  PropagatorConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_final = 0.1;
  cfg.record_every = 100;
  for (auto _ : state) benchmark::DoNotOptimize(propagate(phi, nl, cfg).final_state);
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_StrangSteps)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
