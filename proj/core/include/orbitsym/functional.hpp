#pragma once

#include <Eigen/Sparse>

#include "orbitsym/chart.hpp"

namespace orbitsym {

/// Two-sheet area functional over a chart.  With du the gradient covector of
/// the midsurface function and dh that of the half-thickness, the integrand
/// at a point with metric g, Killing norm k and connection form w is
///
///   f(du) = sqrt(1 + k^2 |w + dh + du|^2) + sqrt(1 + k^2 |w - dh + du|^2),
///
/// all norms taken with g^{-1} on covectors.  f is strictly convex in du and
/// Lipschitz with constant 2k.

/// Everything the integrand needs at one quadrature point.  w, dh, du are
/// coordinate covectors; direction arguments of the forms below are
/// coordinate vectors.
struct PointKernel {
  Mat g;
  Mat g_inv;
  double k = 1.0;
  Vec w;
  Vec dh;
};

double f_value(const PointKernel& q, const Vec& du);

/// First derivative of f at du as a coordinate covector r: df(X) = r . X.
Vec df_covector(const PointKernel& q, const Vec& du, double eps = 0.0);

/// Second derivative of f at du as a covariant matrix M: ddf(X, Y) = X^T M Y.
Mat ddf_matrix(const PointKernel& q, const Vec& du, double eps = 0.0);

double ddf_apply(const PointKernel& q, const Vec& du, const Vec& x, double eps = 0.0);

/// Squared norms of the tangential projections of a coordinate vector x onto
/// the graph hypersurfaces: |P(x)|^2 = |x|^2 - <V,x>^2/(1+|V|^2) with
/// V = k (W + grad u), and the analogous quantities for V +- = V +- k grad h.
struct ProjectionNorms {
  double p_sq = 0.0;
  double p_plus_sq = 0.0;
  double p_minus_sq = 0.0;
};
ProjectionNorms projection_norms(const PointKernel& q, const Vec& du, const Vec& x);

/// Pointwise ellipticity constants
///   mu1 = k / (2 sqrt(1 + k^2|W|^2) (1 + k^2|grad h|^2)^{3/2}),
///   mu2 = 16 k^2 sqrt(1 + k^2|W|^2) (1 + k^2|grad h|^2)^{5/2};
/// they sandwich ddf:  mu1 |P(x)|^2 / sqrt(1+|grad u|^2) <= ddf(x,x)
///                     <= mu2 |P(x)|^2 / sqrt(1+|grad u|^2).
struct EllipticityBounds {
  double mu1 = 0.0;
  double mu2 = 0.0;
};
EllipticityBounds ellipticity_bounds(const PointKernel& q);

/// A chart together with the half-thickness h and midsurface function u that
/// describe a two-sided graph domain along the orbits.
class DomainSpec {
 public:
  DomainSpec(const Chart& chart, NodalFunction h, NodalFunction u);

  const Chart& chart() const { return *chart_; }
  const NodalFunction& h() const { return h_; }
  const NodalFunction& u() const { return u_; }
  NodalFunction& u() { return u_; }
  void set_u(NodalFunction u) { u_ = std::move(u); }
  const std::vector<Vec>& dh() const { return dh_; }
  double h_bary(int s) const { return h_bary_[s]; }

  PointKernel kernel(int s) const;

 private:
  const Chart* chart_;
  NodalFunction h_;
  NodalFunction u_;
  std::vector<Vec> dh_;
  std::vector<double> h_bary_;
};

/// Convenience: spec with the chart's sampled h and u = 0.
DomainSpec make_spec(const Chart& chart);

/// Single-graph area: integral of sqrt(1 + k^2 |w + du|^2).
double graph_area(const Chart& chart, const NodalFunction& u);

/// Two-sheet area A(u); constant shifts of u leave it unchanged.
double area(const DomainSpec& spec);

/// A_eps(u) = A(u) + eps * integral of |grad u|^2.  A_0 = A.
double area_eps(const DomainSpec& spec, double eps);

/// Assembled residual of the natural-boundary weak form: component i is the
/// derivative of A_eps along the nodal basis function of node i.
Eigen::VectorXd first_variation(const DomainSpec& spec, double eps);

/// Action of the second variation on a direction (winding-free), as a nodal
/// covector.  Symmetric, positive semidefinite with kernel the constants.
Eigen::VectorXd second_variation_apply(const DomainSpec& spec, double eps,
                                       const NodalFunction& direction);

/// Assembled sparse second variation (same bilinear form).
Eigen::SparseMatrix<double> second_variation_matrix(const DomainSpec& spec, double eps);

std::vector<EllipticityBounds> ellipticity_bounds(const DomainSpec& spec);

/// Per-simplex projection norms of a per-simplex direction field.
std::vector<ProjectionNorms> projections(const DomainSpec& spec, const std::vector<Vec>& x);

}  // namespace orbitsym
