#pragma once

#include "orbitsym/solver.hpp"

namespace orbitsym {

/// Orbit-sliding symmetrization: among all domains obtained by moving the
/// orbit segments of a two-sided graph domain, find the one of least
/// boundary area.  Volume is preserved by construction; area comparisons
/// are made between discrete functional values under identical quadrature.

struct SymmetrizedDomain {
  NodalFunction u0;   // minimizing midsurface
  NodalFunction h;
  Eigen::VectorXd sheet_lower;  // u0 - h per node
  Eigen::VectorXd sheet_upper;  // u0 + h per node
  double area_value = 0.0;      // A(u0)
  double area_initial = 0.0;    // A(u_init)
  double volume = 0.0;
  SolveReport report;
};

SymmetrizedDomain symmetrize(const Chart& chart, const NodalFunction& h,
                             const NodalFunction& u_init, const SolveConfig& config = {});

/// Ambient volume of the domain: integral of 2 h k dvol.  Independent of the
/// midsurface function by construction.
double domain_volume(const Chart& chart, const NodalFunction& h);

/// Winding experiment on a seam annulus: scan the integer winding m and
/// minimize at each fixed m (the functional is convex in u at fixed m but
/// not jointly).  With nonzero loop holonomy of w and small period, some
/// m != 0 wins; with exact w the minimum sits at m = 0.
struct HelixSpec {
  const Chart* chart = nullptr;
  std::vector<int> core_loop;
  double period = 0.1;
  int winding_min = -2;
  int winding_max = 2;
  NodalFunction h;
  bool expect_holonomy = true;  // assert nonzero loop holonomy before scanning
};

struct WindingResult {
  int winding = 0;
  double area_value = 0.0;
  bool converged = false;
  NodalFunction u0;
};

struct HelixResult {
  double holonomy = 0.0;
  std::vector<WindingResult> table;  // ordered by winding
  int best_winding = 0;
  double best_area = 0.0;
};

HelixResult build_helix(const HelixSpec& spec, const SolveConfig& config = {}, int threads = 1);

}  // namespace orbitsym
