#include <benchmark/benchmark.h>

#include <cmath>

#include "orbitsym/solver.hpp"

using namespace orbitsym;

namespace {

constexpr double kPi = 3.14159265358979323846;

Chart make_manufactured(int n) {
  Region r;
  r.dim = 2;
  r.lo = {0.0, 0.0, 0.0};
  r.hi = {1.0, 1.0, 0.0};
  r.cells = {n, n, 0};
  CovectorField w = [](const Vec& x) {
    Vec v(2);
    v[0] = kPi / 10.0 * std::cos(kPi * x[0]) * std::sin(kPi * x[1]);
    v[1] = kPi / 10.0 * std::sin(kPi * x[0]) * std::cos(kPi * x[1]);
    return v;
  };
  return build_synthetic_chart(r, [](const Vec&) { return 0.25; }, w, "bench");
}

NodalFunction const_h(const Chart& chart, double v) {
  NodalFunction h = NodalFunction::zero(chart.grid.n_nodes());
  h.values.setConstant(v);
  return h;
}

void BM_KillingNormCH2(benchmark::State& state) {
  const SpaceBackend b = SpaceBackend::complex_hyperbolic2();
  double t = 0.0;
  for (auto _ : state) {
    t += 1e-6;
    benchmark::DoNotOptimize(killing_norm(b, {1.0 + t, 0.7}));
  }
}
BENCHMARK(BM_KillingNormCH2);

void BM_HorWCH2(benchmark::State& state) {
  const SpaceBackend b = SpaceBackend::complex_hyperbolic2();
  double t = 0.0;
  for (auto _ : state) {
    t += 1e-6;
    benchmark::DoNotOptimize(hor_w(b, {1.0 + t, 0.7}));
  }
}
BENCHMARK(BM_HorWCH2);

void BM_ChartBuild(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(make_manufactured(n));
  state.SetComplexityN(n);
}
BENCHMARK(BM_ChartBuild)->Arg(32)->Arg(64)->Complexity();

void BM_AreaEps(benchmark::State& state) {
  const Chart chart = make_manufactured(static_cast<int>(state.range(0)));
  DomainSpec spec(chart, const_h(chart, 0.25), NodalFunction::zero(chart.grid.n_nodes()));
  for (auto _ : state) benchmark::DoNotOptimize(area_eps(spec, 0.1));
  state.SetItemsProcessed(state.iterations() * chart.grid.n_simplices());
}
BENCHMARK(BM_AreaEps)->Arg(64)->Arg(128);

void BM_FirstVariation(benchmark::State& state) {
  const Chart chart = make_manufactured(static_cast<int>(state.range(0)));
  DomainSpec spec(chart, const_h(chart, 0.25), NodalFunction::zero(chart.grid.n_nodes()));
  for (auto _ : state) benchmark::DoNotOptimize(first_variation(spec, 0.1));
  state.SetItemsProcessed(state.iterations() * chart.grid.n_simplices());
}
BENCHMARK(BM_FirstVariation)->Arg(64)->Arg(128);

void BM_HessianAssembly(benchmark::State& state) {
  const Chart chart = make_manufactured(static_cast<int>(state.range(0)));
  DomainSpec spec(chart, const_h(chart, 0.25), NodalFunction::zero(chart.grid.n_nodes()));
  for (auto _ : state) benchmark::DoNotOptimize(second_variation_matrix(spec, 0.1));
}
BENCHMARK(BM_HessianAssembly)->Arg(64)->Arg(128);

void BM_MinimizeEps(benchmark::State& state) {
  const Chart chart = make_manufactured(static_cast<int>(state.range(0)));
  const NodalFunction h = const_h(chart, 0.25);
  const NodalFunction zero = NodalFunction::zero(chart.grid.n_nodes());
  for (auto _ : state) benchmark::DoNotOptimize(minimize_eps(chart, h, 0.25, zero));
}
BENCHMARK(BM_MinimizeEps)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ContinuationSolve(benchmark::State& state) {
  const Chart chart = make_manufactured(static_cast<int>(state.range(0)));
  const NodalFunction h = const_h(chart, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(continuation_solve(chart, h));
}
BENCHMARK(BM_ContinuationSolve)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
