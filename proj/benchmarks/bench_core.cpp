#include <benchmark/benchmark.h>

#include "glb/dynamics.hpp"
#include "glb/ground_state.hpp"
#include "glb/linearized.hpp"
#include "glb/modulation.hpp"

using namespace glb;

namespace {

void BM_laplacian(benchmark::State& state) {
  const GridPtr g = make_grid(4, 1e-3, 1e2, state.range(0), Stretch::geometric);
  const RadialField u = bubble(0.0, 1.0, g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(laplacian(u));
  }
}
BENCHMARK(BM_laplacian)->Arg(1024)->Arg(2048)->Arg(4096);

void BM_step(benchmark::State& state) {
  const GridPtr g = make_grid(4, 1e-3, 1e2, state.range(0), Stretch::geometric);
  FlowState s;
  s.u = bubble(0.0, 1.0, g);
  FlowConfig cfg;
  cfg.dt = 1e-4;
  for (auto _ : state) {
    s = step(s, cfg);
  }
}
BENCHMARK(BM_step)->Arg(1024)->Arg(2048)->Arg(4096);

void BM_eigen_ground(benchmark::State& state) {
  const GridPtr g = make_grid(4, 1e-3, 1e2, state.range(0), Stretch::geometric);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eigen_ground(LSign::plus, 2, g));
  }
}
BENCHMARK(BM_eigen_ground)->Arg(1024)->Arg(2048);

void BM_fit_decomposition(benchmark::State& state) {
  const GridPtr g = make_grid(4, 1e-3, 1e2, state.range(0), Stretch::geometric);
  const TestProfiles tp = build_test_profiles(g);
  const RadialField u = bubble(0.4, 1.2, g);
  const BubbleParams g1({0.35}, {1.3});
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_decomposition(u, 1, g1, tp));
  }
}
BENCHMARK(BM_fit_decomposition)->Arg(1024)->Arg(2048);

}  // namespace

BENCHMARK_MAIN();
