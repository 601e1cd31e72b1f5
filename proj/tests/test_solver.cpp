#include <doctest.h>

#include <cmath>
#include <random>

#include "orbitsym/solver.hpp"

using namespace orbitsym;

namespace {

constexpr double kPi = 3.14159265358979323846;

Region square(int n) {
  Region r;
  r.dim = 2;
  r.lo = {0.0, 0.0, 0.0};
  r.hi = {1.0, 1.0, 0.0};
  r.cells = {n, n, 0};
  return r;
}

ScalarField const_h(double v) {
  return [v](const Vec&) { return v; };
}

NodalFunction random_nodal(const Grid& grid, unsigned seed, double scale) {
  std::mt19937_64 gen(seed);
  NodalFunction u = NodalFunction::zero(grid.n_nodes());
  for (int i = 0; i < grid.n_nodes(); ++i) {
    const Vec x = grid.node(i);
    u.values[i] = scale * (std::sin(2.0 * kPi * x[0] + seed) * std::cos(2.0 * kPi * x[1]) +
                           0.1 * std::normal_distribution<double>()(gen));
  }
  return u;
}

Chart manufactured(int n) {
  CovectorField w = [](const Vec& x) {
    Vec v(2);
    v[0] = kPi / 10.0 * std::cos(kPi * x[0]) * std::sin(kPi * x[1]);
    v[1] = kPi / 10.0 * std::sin(kPi * x[0]) * std::cos(kPi * x[1]);
    return v;
  };
  return build_synthetic_chart(square(n), const_h(0.25), w, "manufactured");
}

}  // namespace

TEST_CASE("schedule is strictly decreasing and ends at eps_min") {
  SolveConfig config;
  const auto s = config.schedule();
  CHECK(s.front() == 1.0);
  CHECK(s.back() == 1e-5);
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] < s[i - 1]);
  SolveConfig bad;
  bad.eps_min = -1.0;
  CHECK_THROWS_AS(bad.schedule(), InvalidArgument);
}

TEST_CASE("flat connection: minimizer is zero from a random start") {
  ScalarField h = [](const Vec& x) { return 0.3 + 0.1 * std::sin(2.0 * kPi * x[0]); };
  const Chart chart =
      build_chart(SpaceBackend::euclidean(3), ChartModel::Cartesian, square(24), h);
  NodalFunction h_nodal = NodalFunction::zero(chart.grid.n_nodes());
  for (int i = 0; i < chart.grid.n_nodes(); ++i) h_nodal.values[i] = h(chart.grid.node(i));

  auto [u, stats] = minimize_eps(chart, h_nodal, 0.5, random_nodal(chart.grid, 3, 0.1));
  CHECK(u.values.lpNorm<Eigen::Infinity>() <= 1e-8);
  CHECK(stats.final_residual <=
        std::max(1e-10 * stats.initial_residual, 1e-13));
  // accepted iterates never increase the objective beyond summation roundoff
  for (std::size_t i = 1; i < stats.area_eps_trace.size(); ++i)
    CHECK(stats.area_eps_trace[i] <=
          stats.area_eps_trace[i - 1] + 1e-13 * (1.0 + std::abs(stats.area_eps_trace[i - 1])));
  CHECK(stats.mean_defect <= 1e-12);

  CHECK_THROWS_AS(minimize_eps(chart, h_nodal, 0.0, u), InvalidArgument);
}

TEST_CASE("continuation solve: energy bound and convergence flags") {
  const Chart chart = manufactured(32);
  NodalFunction h_nodal = NodalFunction::zero(chart.grid.n_nodes());
  h_nodal.values.setConstant(0.25);
  const SolveReport report = continuation_solve(chart, h_nodal);
  CHECK(report.converged);
  CHECK(!report.degenerate_h);
  for (const auto& st : report.stages) {
    CHECK(st.eps * st.grad_energy <= report.area_eps1_of_zero * (1.0 + 1e-12));
    CHECK(st.final_residual <= std::max(1e-10 * st.initial_residual,
                                        1e-13 * (1.0 + std::abs(st.area_eps_value))));
  }
  // areas reported at eps = 0 never exceed the starting area
  DomainSpec zero_spec(chart, h_nodal, NodalFunction::zero(chart.grid.n_nodes()));
  CHECK(report.stages.back().area_value <= area(zero_spec));
}

TEST_CASE("manufactured connection is undone by the minimizer") {
  const Chart chart = manufactured(32);
  NodalFunction h_nodal = NodalFunction::zero(chart.grid.n_nodes());
  h_nodal.values.setConstant(0.25);
  const SolveReport report = continuation_solve(chart, h_nodal);
  NodalFunction target = NodalFunction::zero(chart.grid.n_nodes());
  for (int i = 0; i < chart.grid.n_nodes(); ++i) {
    const Vec x = chart.grid.node(i);
    target.values[i] = -std::sin(kPi * x[0]) * std::sin(kPi * x[1]) / 10.0;
  }
  project_mean_zero(chart.grid, chart.fields, target);
  CHECK((report.u0.values - target.values).lpNorm<Eigen::Infinity>() <= 2e-2);
}

TEST_CASE("degenerate h is solved and flagged") {
  const Chart chart = manufactured(16);
  NodalFunction h_zero = NodalFunction::zero(chart.grid.n_nodes());
  const SolveReport report = continuation_solve(chart, h_zero);
  CHECK(report.degenerate_h);
  // with coinciding sheets the functional is twice the single-graph area
  DomainSpec spec(chart, h_zero, report.u0);
  CHECK(area(spec) == doctest::Approx(2.0 * graph_area(chart, report.u0)).epsilon(1e-14));
}

TEST_CASE("independent warm starts give the same minimizer") {
  const Chart chart = manufactured(24);
  NodalFunction h_nodal = NodalFunction::zero(chart.grid.n_nodes());
  h_nodal.values.setConstant(0.25);
  NodalFunction w1 = random_nodal(chart.grid, 101, 0.2);
  NodalFunction w2 = random_nodal(chart.grid, 202, 0.2);
  const SolveReport r1 = continuation_solve(chart, h_nodal, {}, &w1);
  const SolveReport r2 = continuation_solve(chart, h_nodal, {}, &w2);
  CHECK((r1.u0.values - r2.u0.values).lpNorm<Eigen::Infinity>() <= 1e-7);
}

TEST_CASE("node distances behave like a metric graph distance") {
  const Chart chart =
      build_chart(SpaceBackend::euclidean(3), ChartModel::Cartesian, square(8), const_h(0.1));
  const auto dist = node_distances(chart, 0);
  CHECK(dist[0] == 0.0);
  // neighbor along the first axis sits one step away
  CHECK(dist[1] == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
  // graph distance dominates the straight-line distance
  for (int i = 0; i < chart.grid.n_nodes(); ++i) {
    const Vec x = chart.grid.node(i);
    CHECK(dist[i] >= (x - chart.grid.node(0)).norm() - 1e-12);
  }
}

TEST_CASE("3d solve: azimuth-independent fields keep the trivial minimizer") {
  Region r;
  r.dim = 3;
  r.lo = {0.6, 0.6, 0.0};
  r.hi = {1.2, 1.0, 2.0 * kPi};
  r.cells = {5, 4, 8};
  r.periodic_axis = 2;
  const Chart chart = build_chart(SpaceBackend::complex_hyperbolic2(), ChartModel::CH2Full, r,
                                  const_h(0.05));
  NodalFunction h_nodal = NodalFunction::zero(chart.grid.n_nodes());
  h_nodal.values.setConstant(0.05);
  NodalFunction warm = random_nodal(chart.grid, 7, 0.05);
  const SolveReport report = continuation_solve(chart, h_nodal, {}, &warm);
  CHECK(report.u0.values.lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("level-set diagnostics on a small solved instance") {
  const Chart chart = manufactured(24);
  NodalFunction h_nodal = NodalFunction::zero(chart.grid.n_nodes());
  h_nodal.values.setConstant(0.25);
  const SolveReport report = continuation_solve(chart, h_nodal);
  const double eps = report.stages.back().eps;
  const int center = chart.grid.n_nodes() / 2;

  const LevelSetDiagnostics probe =
      beta_diagnostic(chart, report.u0, eps, center, {0.0}, {10.0});
  REQUIRE(probe.q_max > 0.0);
  std::vector<double> lambdas;
  for (int i = 0; i < 6; ++i) lambdas.push_back(probe.q_max * 1.1 * i / 5.0);
  std::vector<double> rhos{0.2, 0.5, 1.0, 2.0};
  const LevelSetDiagnostics diag = beta_diagnostic(chart, report.u0, eps, center, lambdas, rhos);

  for (std::size_t ri = 0; ri < rhos.size(); ++ri) {
    // rows above sup q vanish
    CHECK(diag.beta(lambdas.size() - 1, ri) == 0.0);
    CHECK(diag.hausdorff(lambdas.size() - 1, ri) == 0.0);
    for (std::size_t li = 0; li + 1 < lambdas.size(); ++li) {
      CHECK(diag.beta(li + 1, ri) <= diag.beta(li, ri) * (1.0 + 1e-15));
      // level-set bound for every pair lambda < Lambda
      for (std::size_t lj = li + 1; lj < lambdas.size(); ++lj) {
        const double gap = lambdas[lj] - lambdas[li];
        CHECK(diag.hausdorff(lj, ri) <=
              diag.beta(li, ri) / (gap * gap) + 1e-12 * (1.0 + diag.hausdorff(lj, ri)));
      }
    }
  }
  for (std::size_t li = 0; li < lambdas.size(); ++li)
    for (std::size_t ri = 0; ri + 1 < rhos.size(); ++ri)
      CHECK(diag.beta(li, ri) <= diag.beta(li, ri + 1) * (1.0 + 1e-15));
}
