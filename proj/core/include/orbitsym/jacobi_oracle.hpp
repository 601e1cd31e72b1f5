#pragma once

#include <Eigen/Dense>
#include <vector>

#include "orbitsym/geometry.hpp"

namespace orbitsym {

/// Independent reference for the closed-form backends: propagates the Killing
/// field and the section-spanning Jacobi fields along a radial geodesic with
/// a fixed-step 4th-order integrator and reconstructs k, <K,nu> and Hor(W)
/// from them.  Verification code only; the solve path never calls this.
struct OracleSample {
  double t = 0.0;
  double k = 0.0;
  double normal_inner = 0.0;
  Eigen::Vector2d hor_w = Eigen::Vector2d::Zero();  // (X1, X2) frame components
  double hor_w_radial = 0.0;  // component along the geodesic direction (zero in theory)
  Eigen::Vector3d section_gram = Eigen::Vector3d::Zero();
  double w_frame = 0.0;  // w paired with the azimuthal Jacobi field
};

/// Complex hyperbolic plane: curvature operator eigenvalues (-4, 0, -1, -1)
/// on the parallel frame (X1, JX1 = radial, X2, JX2).  Returns one sample per
/// requested parameter value; t_values must be sorted and nonnegative.
std::vector<OracleSample> ch2_oracle(double theta, const std::vector<double>& t_values,
                                     double step = 1e-4);

/// Constant-curvature spaces: same construction with curvature -1 (real
/// hyperbolic) or 0 (euclidean).  hor_w vanishes identically; the returned
/// samples expose how far the integrated value is from zero.
std::vector<OracleSample> constant_curvature_oracle(SpaceKind kind,
                                                    const std::vector<double>& t_values,
                                                    double step = 1e-4);

}  // namespace orbitsym
