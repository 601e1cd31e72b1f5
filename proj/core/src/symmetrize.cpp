#include "orbitsym/symmetrize.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace orbitsym {

SymmetrizedDomain symmetrize(const Chart& chart, const NodalFunction& h,
                             const NodalFunction& u_init, const SolveConfig& config) {
  require(u_init.values.allFinite(), "initial function must be finite");
  SymmetrizedDomain out;
  {
    DomainSpec init_spec(chart, h, u_init);
    out.area_initial = area(init_spec);
  }
  out.report = continuation_solve(chart, h, config, &u_init);
  out.u0 = out.report.u0;
  out.h = h;
  out.sheet_lower = out.u0.values - h.values;
  out.sheet_upper = out.u0.values + h.values;
  {
    DomainSpec final_spec(chart, h, out.u0);
    out.area_value = area(final_spec);
  }
  out.volume = domain_volume(chart, h);
  return out;
}

double domain_volume(const Chart& chart, const NodalFunction& h) {
  require(h.values.size() == chart.grid.n_nodes(), "h size mismatch");
  require(h.values.minCoeff() >= 0.0, "half-thickness h must be nonnegative");
  const Grid& grid = chart.grid;
  const int nv = grid.dim + 1;
  double total = 0.0;
  for (int s = 0; s < grid.n_simplices(); ++s) {
    double hb = 0.0;
    for (int v = 0; v < nv; ++v) hb += h.values[grid.simplex_nodes[s * nv + v]];
    hb /= nv;
    total += 2.0 * hb * chart.fields.k[s] * chart.fields.weight[s];
  }
  return total;
}

HelixResult build_helix(const HelixSpec& spec, const SolveConfig& config, int threads) {
  require(spec.chart != nullptr, "helix spec needs a chart");
  require(spec.chart->grid.seam.has_value(), "helix experiment needs a periodic seam");
  require(spec.winding_min <= spec.winding_max, "empty winding range");
  require(spec.period > 0.0, "winding period must be positive");

  HelixResult result;
  result.holonomy = loop_holonomy(spec.chart->grid, spec.chart->fields, spec.core_loop);
  if (spec.expect_holonomy)
    require(std::abs(result.holonomy) > 1e-10,
            "core loop has vanishing holonomy; nothing to wind against");

  auto run_branch = [&](int m) -> WindingResult {
    WindingResult wr;
    wr.winding = m;
    NodalFunction u_init = NodalFunction::zero(spec.chart->grid.n_nodes());
    u_init.winding = m;
    u_init.period = spec.period;
    try {
      const SolveReport report = continuation_solve(*spec.chart, spec.h, config, &u_init);
      wr.converged = report.converged;
      wr.u0 = report.u0;
      DomainSpec final_spec(*spec.chart, spec.h, report.u0);
      wr.area_value = area(final_spec);
    } catch (const NonconvergenceError&) {
      wr.converged = false;
      wr.area_value = std::numeric_limits<double>::infinity();
    }
    return wr;
  };

  std::vector<int> windings;
  for (int m = spec.winding_min; m <= spec.winding_max; ++m) windings.push_back(m);

  if (threads > 1) {
    std::vector<std::future<WindingResult>> futures;
    futures.reserve(windings.size());
    for (int m : windings)
      futures.push_back(std::async(std::launch::async, run_branch, m));
    for (auto& f : futures) result.table.push_back(f.get());
  } else {
    for (int m : windings) result.table.push_back(run_branch(m));
  }

  const auto best = std::min_element(
      result.table.begin(), result.table.end(),
      [](const WindingResult& a, const WindingResult& b) { return a.area_value < b.area_value; });
  if (!std::isfinite(best->area_value))
    throw NonconvergenceError("every winding branch diverged",
                              NewtonStats{});
  result.best_winding = best->winding;
  result.best_area = best->area_value;
  return result;
}

}  // namespace orbitsym
