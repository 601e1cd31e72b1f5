#pragma once

#include <vector>

#include "orbitsym/functional.hpp"

namespace orbitsym {

/// Damped Newton minimization of the regularized area functional over
/// mean-zero nodal functions, with continuation in the regularization
/// parameter.  Each A_eps is strictly convex, so the per-eps minimizer is
/// unique up to constants; the continuation limit is reported as the
/// discrete area minimizer.

struct SolveConfig {
  double eps_start = 1.0;
  double eps_factor = 0.25;
  double eps_min = 1e-5;
  double newton_tol_rel = 1e-10;   // residual norm relative to the stage start
  int max_newton_iter = 60;
  double ls_backtrack = 0.5;
  double ls_sufficient_decrease = 1e-4;
  int max_backtracks = 50;
  double continuation_tol = 1e-6;  // sup-norm change between consecutive stages
  double interior_margin = 0.10;   // fraction of the extent excluded per side

  // strictly decreasing eps values ending at eps_min
  std::vector<double> schedule() const;
};

struct NewtonStats {
  double eps = 0.0;
  int iterations = 0;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  double area_value = 0.0;       // A at eps = 0
  double area_eps_value = 0.0;   // A_eps
  double sup_grad_interior = 0.0;
  double sup_grad_global = 0.0;
  double grad_energy = 0.0;      // integral of |grad u|^2
  double mean_defect = 0.0;
  std::vector<double> area_eps_trace;  // per accepted iterate, nonincreasing
};

struct SolveReport {
  std::vector<NewtonStats> stages;
  NodalFunction u0;
  bool converged = false;    // continuation stop reached
  bool degenerate_h = false; // h vanishes identically (sheets coincide)
  double area_eps1_of_zero = 0.0;  // A_1(0), energy-bound reference
  std::string message;
};

/// Thrown when the line search cannot make progress; carries the stage state.
struct NonconvergenceError : std::runtime_error {
  NonconvergenceError(const std::string& msg, NewtonStats stats)
      : std::runtime_error(msg), stats(std::move(stats)) {}
  NewtonStats stats;
};

/// Minimize A_eps at fixed eps > 0 starting from warm_start (projected to
/// mean zero; its winding is kept fixed).
std::pair<NodalFunction, NewtonStats> minimize_eps(const Chart& chart, const NodalFunction& h,
                                                   double eps, const NodalFunction& warm_start,
                                                   const SolveConfig& config = {});

/// Run minimize_eps down the schedule with warm starts.  u_init, when given,
/// seeds the first stage and fixes the winding.  If the continuation
/// tolerance is never met the report is flagged unconverged but still
/// carries the last iterate.
SolveReport continuation_solve(const Chart& chart, const NodalFunction& h,
                               const SolveConfig& config = {},
                               const NodalFunction* u_init = nullptr);

/// Level-set energies of q = log(1 + |grad u|^2) over discrete balls around
/// a center node (graph distance along edges measured with the metric).
/// For each lambda and rho:
///   beta(lambda, rho)  = sum over {q > lambda} within the rho-ball of
///                        (q-lambda)^2 sqrt(1+p) w + eps (1+p)(q-lambda)^2 w,
///   hausdorff(lambda, rho) = sum of sqrt(1+p) w over the same set,
/// with p = |grad u|^2 and w the volume weights.  beta and hausdorff are
/// nonincreasing in lambda and nondecreasing in rho, and for lambda < Lambda
///   hausdorff(Lambda, R) <= beta(lambda, R) / (Lambda - lambda)^2.
struct LevelSetDiagnostics {
  std::vector<double> lambda_grid;
  std::vector<double> rho_grid;
  Eigen::MatrixXd beta;       // lambda rows, rho columns
  Eigen::MatrixXd hausdorff;
  double q_max = 0.0;
  int center_node = 0;
};

LevelSetDiagnostics beta_diagnostic(const Chart& chart, const NodalFunction& u_eps, double eps,
                                    int center_node, const std::vector<double>& lambda_grid,
                                    const std::vector<double>& rho_grid);

/// Graph distances from a node along simplex edges with metric edge lengths.
std::vector<double> node_distances(const Chart& chart, int center_node);

/// max of |grad u| over simplices whose barycenter keeps the given margin
/// (fraction of the extent) from every non-periodic side of the chart box.
double sup_gradient_interior(const Chart& chart, const NodalFunction& u, double margin);

}  // namespace orbitsym
