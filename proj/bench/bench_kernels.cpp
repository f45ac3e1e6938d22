#include <benchmark/benchmark.h>

#include <cmath>

#include "wolbopt/kernels.hpp"
#include "wolbopt/model.hpp"
#include "wolbopt/optimize.hpp"
#include "wolbopt/pde.hpp"

namespace {

using namespace wolbopt;

const Model& model() {
  static const Model m(ModelParams::table1());
  return m;
}

SpatialField bump_state(const Grid1D& grid) {
  SpatialField p(grid.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double z = (grid.x(i) - 0.5 * grid.L()) / 3.0;
    p[i] = 0.7 * std::exp(-z * z);
  }
  return p;
}

template <bool Parallel>
void BM_EulerStep(benchmark::State& state) {
  const Grid1D grid(30.0, static_cast<int>(state.range(0)));
  const auto s = kernels::view(grid.laplacian());
  const double coef = 1.0 / (grid.dx() * grid.dx());
  const double dt = 0.25 * grid.dx() * grid.dx();
  SpatialField p = bump_state(grid), out(p.size());
  auto r = [](std::size_t, double y) { return model().f(y); };
  for (auto _ : state) {
    if constexpr (Parallel) kernels::omp::euler_step(s, coef, dt, p.data(), out.data(), r, 0);
    else kernels::serial::euler_step(s, coef, dt, p.data(), out.data(), r);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(p.size()));
}

void BM_EulerStepSerial(benchmark::State& s) { BM_EulerStep<false>(s); }
void BM_EulerStepOpenMP(benchmark::State& s) { BM_EulerStep<true>(s); }

BENCHMARK(BM_EulerStepSerial)->RangeMultiplier(16)->Range(16, 1 << 20);
BENCHMARK(BM_EulerStepOpenMP)->RangeMultiplier(16)->Range(16, 1 << 20);

void BM_ForwardSerial(benchmark::State& state) {
  const Grid1D grid(30.0, 20);
  const auto p0 = bump_state(grid);
  for (auto _ : state) benchmark::DoNotOptimize(solve_forward_serial(p0, grid, model(), 40.0, 200));
}

void BM_ForwardOpenMP(benchmark::State& state) {
  const Grid1D grid(30.0, 20);
  const auto p0 = bump_state(grid);
  for (auto _ : state) benchmark::DoNotOptimize(solve_forward_from(p0, grid, model(), 40.0, 200));
}

BENCHMARK(BM_ForwardSerial);
BENCHMARK(BM_ForwardOpenMP);

void BM_Multistart(benchmark::State& state) {
  const Grid1D grid(30.0, 20);
  const ReleaseBudget b{0.8, 0.08};
  const auto starts = default_starts(b, grid, model());
  OptimOptions opts;
  opts.max_iter = 200;
  for (auto _ : state)
    benchmark::DoNotOptimize(multistart(b, grid, model(), 40.0, 200, starts, opts, state.range(0) != 0));
}

BENCHMARK(BM_Multistart)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
