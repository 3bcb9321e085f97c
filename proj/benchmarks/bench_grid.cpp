#include <benchmark/benchmark.h>

#include <random>

#include "tfcond/grid.hpp"
#include "tfcond/model.hpp"

using namespace tfcond;

namespace {

Field noise(const Grid& g) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  Field f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = cplx(nd(rng), nd(rng));
  return f;
}

}  // namespace

static void BM_Transform3D(benchmark::State& state) {
  const Grid g = make_grid(3, static_cast<int>(state.range(0)), 8.0);
  const Field f = noise(g);
  for (auto _ : state) benchmark::DoNotOptimize(to_frequency(f));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_Transform3D)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_Transform1D(benchmark::State& state) {
  const Grid g = make_grid(1, static_cast<int>(state.range(0)), 16.0);
  const Field f = noise(g);
  for (auto _ : state) benchmark::DoNotOptimize(to_frequency(f));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_Transform1D)->Arg(1 << 12)->Arg(1 << 16);

static void BM_Convolve3D(benchmark::State& state) {
  const Grid g = make_grid(3, static_cast<int>(state.range(0)), 8.0);
  const Field kernel = InteractionSpec{}.sample(g);
  const auto mult = kernel_multiplier(kernel);
  const Field f = noise(g);
  for (auto _ : state) benchmark::DoNotOptimize(convolve_with_multiplier(mult, f));
}
BENCHMARK(BM_Convolve3D)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_Norms3D(benchmark::State& state) {
  const Grid g = make_grid(3, 64, 8.0);
  const Field f = noise(g);
  for (auto _ : state) benchmark::DoNotOptimize(norms(f));
}
BENCHMARK(BM_Norms3D)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
