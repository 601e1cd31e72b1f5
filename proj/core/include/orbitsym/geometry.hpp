#pragma once

#include <Eigen/Dense>

#include "orbitsym/types.hpp"

namespace orbitsym {

/// Closed-form geometry backends for the orbit space of a transvection.
///
/// Each backend describes a symmetric space together with a one-parameter
/// transvection group along a fixed geodesic.  Quotienting by the group gives
/// the orbit space; a canonical section realizes it as a hypersurface of the
/// ambient space.  The backend answers, at any point of the radial chart:
///
///   k   norm of the Killing field along the section (k >= 1, k = 1 on the
///       axis point t = 0),
///   W   the connection vector field measuring the vertical tilt of the
///       section (identically zero in constant curvature),
///   g   the orbit-space metric.
///
/// All quantities are exact closed forms; no ODE integration happens here.
enum class SpaceKind { Euclidean, RealHyperbolic, ComplexHyperbolic2 };

struct SpaceBackend {
  SpaceKind kind = SpaceKind::Euclidean;
  int ambient_dim = 3;

  static SpaceBackend euclidean(int dim);
  static SpaceBackend real_hyperbolic(int dim);   // sectional curvature -1
  static SpaceBackend complex_hyperbolic2();      // real dim 4, hol. curvature -4

  int orbit_dim() const { return ambient_dim - 1; }
};

/// Radial chart point in the orbit space:
///   t      geodesic distance from the axis point of the section,
///   theta  (complex hyperbolic only) angle between the radial direction and
///          the image of the geodesic direction under the complex structure.
/// Azimuthal angles completing the chart never enter the field values, so
/// they are not stored.  Canonically theta lies in [0, pi/2]; the closed
/// forms extend smoothly to any real theta and the extension is used by the
/// reflection-equivariance checks.
struct RadialCoord {
  double t = 0.0;
  double theta = 0.0;
};

/// Norm of the Killing field at p.  Euclidean: 1.  Real hyperbolic: cosh t.
/// Complex hyperbolic plane:
///   k(t,theta) = sqrt(cos^2(theta) cosh^2(2t) + sin^2(theta) cosh^2(t)).
double killing_norm(const SpaceBackend& backend, const RadialCoord& p);

/// Horizontal lift of W at p, expressed in the parallel frame (X1, X2) of
/// the radial geodesic.  Identically zero for the constant-curvature
/// backends.  For the complex hyperbolic plane the two components are
///
///   W1 = cos(theta) * (cosh(2t)/k^2 - 1/D),
///   W2 = sin(theta) cosh(t) * (1/k^2 - 1/D),
///
/// with D = cos^2(theta) cosh(2t) + sin^2(theta) cosh^2(t).  The lift is
/// orthogonal to the radial direction and decays to zero as t -> infinity.
Eigen::Vector2d hor_w(const SpaceBackend& backend, const RadialCoord& p);

/// Inner product <K, nu> of the Killing field with the unit normal of the
/// section.  Equals k for constant curvature (the normal is parallel to K);
/// for the complex hyperbolic plane
///   <K,nu> = D / sqrt(sin^2(theta) cosh^2(t) + cos^2(theta)).
/// Always positive.
double normal_inner(const SpaceBackend& backend, const RadialCoord& p);

/// |W|^2 = -1/k^2 + 1/<K,nu>^2, nonnegative, zero exactly where the section
/// is horizontal (t = 0 for every backend; additionally theta in {0, pi/2}
/// for the complex hyperbolic plane).
double w_norm_sq(const SpaceBackend& backend, const RadialCoord& p);

/// sqrt(1 + k^2 |W|^2) == k / |<K,nu>|: the area density of the section
/// graph over the orbit space.
double area_tilt(const SpaceBackend& backend, const RadialCoord& p);

/// Gram matrix of the adapted Jacobi frame spanning the section tangent at
/// parameter t: the unit radial field plus the angular Jacobi fields.
/// Positive definite for t > 0; the t = 0 coordinate singularity is flagged
/// as a DomainError (callers must use limiting values nearby).
///
/// Euclidean: identity.  Real hyperbolic: diag(1, sinh^2 t, ...).  Complex
/// hyperbolic plane: diag(1, sinh^2 t, Gb) with
///   Gb = sin^2(theta) sinh^2(2t)/4 + cos^2(theta) sinh^2(t).
Eigen::MatrixXd section_metric(const SpaceBackend& backend, const RadialCoord& p);

/// Covector components of w in the same frame as section_metric.  Only the
/// last (azimuthal) slot is ever nonzero:
///   w_b = 2 sin(theta) cos(theta) sinh^3(t) cosh(t) / k^2   (complex hyperbolic).
Eigen::VectorXd section_w(const SpaceBackend& backend, const RadialCoord& p);

/// Orbit-space metric g = section_metric - k^2 * w (x) w in the same frame.
/// Throws ConsistencyError if the result fails to be positive definite.
Eigen::MatrixXd orbit_metric(const SpaceBackend& backend, const RadialCoord& p);

}  // namespace orbitsym
