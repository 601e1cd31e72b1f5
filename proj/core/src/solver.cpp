#include "orbitsym/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <sstream>

namespace orbitsym {

std::vector<double> SolveConfig::schedule() const {
  require(eps_start > 0.0 && eps_min > 0.0 && eps_min <= eps_start,
          "eps schedule bounds must be positive with eps_min <= eps_start");
  require(eps_factor > 0.0 && eps_factor < 1.0, "eps factor must lie in (0,1)");
  std::vector<double> s;
  for (double e = eps_start; e >= eps_min; e *= eps_factor) s.push_back(e);
  if (s.empty() || s.back() > eps_min) s.push_back(eps_min);
  return s;
}

namespace {

double sup_norm(const Eigen::VectorXd& v) { return v.lpNorm<Eigen::Infinity>(); }

double grad_energy_of(const DomainSpec& spec) {
  const Chart& chart = spec.chart();
  const auto du = discrete_gradient(chart.grid, spec.u());
  double total = 0.0;
  for (int s = 0; s < chart.grid.n_simplices(); ++s)
    total += du[s].dot(chart.fields.g_inv[s] * du[s]) * chart.fields.weight[s];
  return total;
}

}  // namespace

double sup_gradient_interior(const Chart& chart, const NodalFunction& u, double margin) {
  const Grid& grid = chart.grid;
  const auto du = discrete_gradient(grid, u);
  double sup = 0.0;
  for (int s = 0; s < grid.n_simplices(); ++s) {
    bool interior = true;
    for (int a = 0; a < grid.dim; ++a) {
      if (a == grid.region.periodic_axis) continue;
      const double lo = grid.region.lo[a], hi = grid.region.hi[a];
      const double m = margin * (hi - lo);
      const double x = grid.barycenter[s][a];
      if (x < lo + m || x > hi - m) interior = false;
    }
    if (!interior) continue;
    sup = std::max(sup, std::sqrt(du[s].dot(chart.fields.g_inv[s] * du[s])));
  }
  return sup;
}

std::pair<NodalFunction, NewtonStats> minimize_eps(const Chart& chart, const NodalFunction& h,
                                                   double eps, const NodalFunction& warm_start,
                                                   const SolveConfig& config) {
  require(eps > 0.0, "minimize_eps needs eps > 0");
  require(config.newton_tol_rel > 0.0 && config.continuation_tol > 0.0 &&
              config.ls_sufficient_decrease > 0.0,
          "solver tolerances must be positive");
  NodalFunction u = warm_start;
  project_mean_zero(chart.grid, chart.fields, u);
  DomainSpec spec(chart, h, u);

  NewtonStats stats;
  stats.eps = eps;

  double value = area_eps(spec, eps);
  require(std::isfinite(value), "area functional is not finite on the warm start");
  Eigen::VectorXd r = first_variation(spec, eps);
  stats.initial_residual = r.norm();
  stats.area_eps_trace.push_back(value);
  const double tol =
      std::max(config.newton_tol_rel * stats.initial_residual, 1e-14 * (1.0 + std::abs(value)));

  // direct factorization at desk scale, deterministic CG beyond it
  constexpr int kDirectSolveLimit = 200 * 200;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
  for (int iter = 0; iter < config.max_newton_iter && r.norm() > tol; ++iter) {
    Eigen::SparseMatrix<double> hess = second_variation_matrix(spec, eps);
    // Pin the constant null direction with a one-entry rank-one shift; the
    // solution of the shifted SPD system is an exact Newton step with
    // delta[0] = 0 (the assembled residual sums to zero).
    const double shift = hess.diagonal().mean();
    hess.coeffRef(0, 0) += shift;
    Eigen::VectorXd delta;
    if (chart.grid.n_nodes() <= kDirectSolveLimit) {
      llt.compute(hess);
      if (llt.info() != Eigen::Success)
        throw NonconvergenceError("hessian factorization failed (not SPD)", stats);
      delta = llt.solve(-r);
    } else {
      Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
      cg.setTolerance(1e-12);
      cg.setMaxIterations(4 * chart.grid.n_nodes());
      cg.compute(hess);
      delta = cg.solve(-r);
      if (cg.info() != Eigen::Success)
        throw NonconvergenceError("iterative hessian solve did not converge", stats);
    }
    const double slope = r.dot(delta);
    if (!(slope < 0.0))
      throw NonconvergenceError("newton direction is not a descent direction", stats);

    // Below this the predicted decrease drowns in the roundoff of the energy
    // sum; descent is then certified by residual reduction instead.
    const double energy_noise =
        64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(value));
    double alpha = 1.0;
    int backtracks = 0;
    NodalFunction trial = spec.u();
    while (true) {
      trial.values = spec.u().values + alpha * delta;
      DomainSpec trial_spec(chart, h, trial);
      const double trial_value = area_eps(trial_spec, eps);
      const bool finite = std::isfinite(trial_value);
      if (finite && trial_value <= value + config.ls_sufficient_decrease * alpha * slope)
        break;
      if (finite && alpha == 1.0 && -slope <= energy_noise &&
          trial_value <= value + energy_noise &&
          first_variation(trial_spec, eps).norm() <= 0.5 * r.norm())
        break;
      alpha *= config.ls_backtrack;
      if (++backtracks > config.max_backtracks) {
        std::ostringstream os;
        os << "line search failed after " << config.max_backtracks << " backtracks at eps=" << eps
           << ", iter=" << iter << ", residual=" << r.norm();
        stats.final_residual = r.norm();
        stats.iterations = iter;
        throw NonconvergenceError(os.str(), stats);
      }
    }
    project_mean_zero(chart.grid, chart.fields, trial);
    spec.set_u(trial);
    value = area_eps(spec, eps);
    r = first_variation(spec, eps);
    stats.area_eps_trace.push_back(value);
    stats.iterations = iter + 1;
  }

  stats.final_residual = r.norm();
  stats.area_eps_value = value;
  stats.area_value = area(spec);
  stats.grad_energy = grad_energy_of(spec);
  stats.sup_grad_interior = sup_gradient_interior(chart, spec.u(), config.interior_margin);
  stats.sup_grad_global = sup_gradient_interior(chart, spec.u(), 0.0);
  const Eigen::VectorXd lw = lumped_weights(chart.grid, chart.fields);
  stats.mean_defect = std::abs(lw.dot(spec.u().values)) / lw.sum();
  return {spec.u(), stats};
}

SolveReport continuation_solve(const Chart& chart, const NodalFunction& h,
                               const SolveConfig& config, const NodalFunction* u_init) {
  SolveReport report;
  NodalFunction u =
      u_init ? *u_init : NodalFunction::zero(chart.grid.n_nodes());
  require(u.values.size() == chart.grid.n_nodes(), "initial function size mismatch");

  {
    DomainSpec zero_spec(chart, h, NodalFunction::zero(chart.grid.n_nodes()));
    report.area_eps1_of_zero = area_eps(zero_spec, 1.0);
    report.degenerate_h = h.values.maxCoeff() <= 0.0;
  }

  Eigen::VectorXd prev;
  for (double eps : config.schedule()) {
    auto [u_next, stats] = minimize_eps(chart, h, eps, u, config);
    u = std::move(u_next);
    report.stages.push_back(std::move(stats));
    if (prev.size() > 0 && sup_norm(u.values - prev) < config.continuation_tol) {
      report.converged = true;
      break;
    }
    prev = u.values;
  }
  if (!report.converged)
    report.message = "continuation stop not met at eps_min; returning last iterate";
  report.u0 = std::move(u);
  return report;
}

std::vector<double> node_distances(const Chart& chart, int center_node) {
  const Grid& grid = chart.grid;
  require(center_node >= 0 && center_node < grid.n_nodes(), "center node out of range");
  // average the metric edge length over the simplices sharing each edge
  std::map<std::pair<int, int>, std::pair<double, int>> edge_acc;
  const int nv = grid.dim + 1;
  for (int s = 0; s < grid.n_simplices(); ++s)
    for (int a = 0; a < nv; ++a)
      for (int b = a + 1; b < nv; ++b) {
        const int na = grid.simplex_nodes[s * nv + a], nb = grid.simplex_nodes[s * nv + b];
        const Vec e = grid.vertex_coord(s, b) - grid.vertex_coord(s, a);
        const double len = std::sqrt(e.dot(chart.fields.g[s] * e));
        auto& acc = edge_acc[{std::min(na, nb), std::max(na, nb)}];
        acc.first += len;
        acc.second += 1;
      }
  std::vector<std::vector<std::pair<int, double>>> adj(grid.n_nodes());
  for (const auto& [key, acc] : edge_acc) {
    const double len = acc.first / acc.second;
    adj[key.first].push_back({key.second, len});
    adj[key.second].push_back({key.first, len});
  }

  std::vector<double> dist(grid.n_nodes(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
  dist[center_node] = 0.0;
  queue.push({0.0, center_node});
  while (!queue.empty()) {
    auto [d, node] = queue.top();
    queue.pop();
    if (d > dist[node]) continue;
    for (const auto& [next, len] : adj[node])
      if (d + len < dist[next]) {
        dist[next] = d + len;
        queue.push({dist[next], next});
      }
  }
  return dist;
}

LevelSetDiagnostics beta_diagnostic(const Chart& chart, const NodalFunction& u_eps, double eps,
                                    int center_node, const std::vector<double>& lambda_grid,
                                    const std::vector<double>& rho_grid) {
  require(eps >= 0.0, "regularization parameter must be nonnegative");
  const Grid& grid = chart.grid;
  const auto du = discrete_gradient(grid, u_eps);
  const auto dist = node_distances(chart, center_node);

  const int n = grid.n_simplices();
  std::vector<double> p(n), q(n), sdist(n);
  const int nv = grid.dim + 1;
  double q_max = 0.0;
  for (int s = 0; s < n; ++s) {
    p[s] = du[s].dot(chart.fields.g_inv[s] * du[s]);
    q[s] = std::log1p(p[s]);
    q_max = std::max(q_max, q[s]);
    double d = 0.0;  // a simplex joins the ball once all of its nodes are inside
    for (int v = 0; v < nv; ++v) d = std::max(d, dist[grid.simplex_nodes[s * nv + v]]);
    sdist[s] = d;
  }

  LevelSetDiagnostics out;
  out.lambda_grid = lambda_grid;
  out.rho_grid = rho_grid;
  out.center_node = center_node;
  out.q_max = q_max;
  out.beta = Eigen::MatrixXd::Zero(lambda_grid.size(), rho_grid.size());
  out.hausdorff = Eigen::MatrixXd::Zero(lambda_grid.size(), rho_grid.size());
  for (std::size_t li = 0; li < lambda_grid.size(); ++li)
    for (std::size_t ri = 0; ri < rho_grid.size(); ++ri) {
      const double lambda = lambda_grid[li], rho = rho_grid[ri];
      double beta = 0.0, haus = 0.0;
      for (int s = 0; s < n; ++s) {
        if (!(q[s] > lambda) || sdist[s] > rho) continue;
        const double excess = q[s] - lambda;
        const double sqrt1p = std::sqrt(1.0 + p[s]);
        beta += (excess * excess * sqrt1p + eps * (1.0 + p[s]) * excess * excess) *
                chart.fields.weight[s];
        haus += sqrt1p * chart.fields.weight[s];
      }
      out.beta(li, ri) = beta;
      out.hausdorff(li, ri) = haus;
    }
  return out;
}

}  // namespace orbitsym
