#include <benchmark/benchmark.h>

#include <random>

#include "tfcond/manybody.hpp"

using namespace tfcond;

namespace {

ManyBodyHamiltonian hamiltonian(int N, int M) {
  static const Grid grid = make_grid(1, 64, 8.0);
  const ModeBasis modes = harmonic_modes(grid, M, TrapSpec{});
  RegimeParams r;
  r.N = N;
  r.g_N = 0.5;
  return build(modes, true, InteractionSpec{}, r);
}

CVec random_state(std::size_t dim) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  CVec v(static_cast<Eigen::Index>(dim));
  for (auto& x : v) x = cplx(nd(rng), nd(rng));
  return v.normalized();
}

}  // namespace

static void BM_BuildHamiltonian(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0)), M = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(hamiltonian(N, M).matrix.nonZeros());
}
BENCHMARK(BM_BuildHamiltonian)->Args({4, 4})->Args({8, 5})->Unit(benchmark::kMillisecond);

static void BM_ApplyHamiltonian(benchmark::State& state) {
  const ManyBodyHamiltonian H = hamiltonian(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const CVec psi = random_state(H.space->dim());
  for (auto _ : state) benchmark::DoNotOptimize(H.apply(psi));
  state.counters["dim"] = static_cast<double>(H.space->dim());
}
BENCHMARK(BM_ApplyHamiltonian)->Args({4, 4})->Args({8, 5})->Args({12, 6});

static void BM_OneRdm(benchmark::State& state) {
  const FockSpace fs(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const CVec psi = random_state(fs.dim());
  for (auto _ : state) benchmark::DoNotOptimize(fs.one_rdm(psi));
}
BENCHMARK(BM_OneRdm)->Args({4, 4})->Args({12, 6});

static void BM_CountingFunctional(benchmark::State& state) {
  auto space = std::make_shared<const FockSpace>(static_cast<int>(state.range(0)), 4);
  CVec phi(4);
  phi << 0.9, 0.3, 0.2, 0.1;
  phi.normalize();
  const ProjectorContext ctx(space, phi);
  const CVec psi = random_state(space->dim());
  for (auto _ : state) benchmark::DoNotOptimize(alpha(ctx, psi, 0.5));
}
BENCHMARK(BM_CountingFunctional)->Arg(4)->Arg(8);

static void BM_GroundStateFewBody(benchmark::State& state) {
  const ManyBodyHamiltonian H = hamiltonian(static_cast<int>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(ground_state(H).energy);
}
BENCHMARK(BM_GroundStateFewBody)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
