#include "orbitsym/geometry.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

namespace orbitsym {

namespace {

void validate(const RadialCoord& p) {
  require_domain(std::isfinite(p.t) && std::isfinite(p.theta),
                 "radial coordinate must be finite");
  require_domain(p.t >= 0.0, "radial coordinate t must be nonnegative");
}

struct Ch2Closed {
  double k2;   // cos^2 cosh^2(2t) + sin^2 cosh^2(t)
  double d;    // cos^2 cosh(2t)  + sin^2 cosh^2(t)
  double st, ct, sh, ch, sh2, ch2;
};

Ch2Closed ch2_eval(const RadialCoord& p) {
  Ch2Closed r;
  r.st = std::sin(p.theta);
  r.ct = std::cos(p.theta);
  r.sh = std::sinh(p.t);
  r.ch = std::cosh(p.t);
  r.sh2 = std::sinh(2.0 * p.t);
  r.ch2 = std::cosh(2.0 * p.t);
  const double c2 = r.ct * r.ct, s2 = r.st * r.st;
  r.k2 = c2 * r.ch2 * r.ch2 + s2 * r.ch * r.ch;
  r.d = c2 * r.ch2 + s2 * r.ch * r.ch;
  return r;
}

}  // namespace

SpaceBackend SpaceBackend::euclidean(int dim) {
  require(dim >= 2, "euclidean backend needs ambient dimension >= 2");
  return {SpaceKind::Euclidean, dim};
}

SpaceBackend SpaceBackend::real_hyperbolic(int dim) {
  require(dim >= 2, "real hyperbolic backend needs ambient dimension >= 2");
  return {SpaceKind::RealHyperbolic, dim};
}

SpaceBackend SpaceBackend::complex_hyperbolic2() {
  return {SpaceKind::ComplexHyperbolic2, 4};
}

double killing_norm(const SpaceBackend& backend, const RadialCoord& p) {
  validate(p);
  switch (backend.kind) {
    case SpaceKind::Euclidean:
      return 1.0;
    case SpaceKind::RealHyperbolic:
      return std::cosh(p.t);
    case SpaceKind::ComplexHyperbolic2:
      return std::max(1.0, std::sqrt(ch2_eval(p).k2));  // clamp roundoff at the axis
  }
  throw InvalidArgument("unknown backend kind");
}

Eigen::Vector2d hor_w(const SpaceBackend& backend, const RadialCoord& p) {
  validate(p);
  if (backend.kind != SpaceKind::ComplexHyperbolic2) return Eigen::Vector2d::Zero();
  const Ch2Closed c = ch2_eval(p);
  Eigen::Vector2d w;
  w[0] = c.ct * (c.ch2 / c.k2 - 1.0 / c.d);
  w[1] = c.st * c.ch * (1.0 / c.k2 - 1.0 / c.d);
  return w;
}

double normal_inner(const SpaceBackend& backend, const RadialCoord& p) {
  validate(p);
  if (backend.kind != SpaceKind::ComplexHyperbolic2) return killing_norm(backend, p);
  const Ch2Closed c = ch2_eval(p);
  return c.d / std::sqrt(c.st * c.st * c.ch * c.ch + c.ct * c.ct);
}

double w_norm_sq(const SpaceBackend& backend, const RadialCoord& p) {
  const double k = killing_norm(backend, p);
  const double kn = normal_inner(backend, p);
  const double v = -1.0 / (k * k) + 1.0 / (kn * kn);
  return v > 0.0 ? v : 0.0;  // clamp roundoff at the zero set
}

double area_tilt(const SpaceBackend& backend, const RadialCoord& p) {
  return killing_norm(backend, p) / std::abs(normal_inner(backend, p));
}

Eigen::MatrixXd section_metric(const SpaceBackend& backend, const RadialCoord& p) {
  validate(p);
  const int d = backend.orbit_dim();
  switch (backend.kind) {
    case SpaceKind::Euclidean:
      return Eigen::MatrixXd::Identity(d, d);
    case SpaceKind::RealHyperbolic: {
      require(d <= 3, "radial chart supports orbit dimension <= 3");
      require_domain(p.t > 0.0,
                     "coordinate singularity at t = 0: use limiting values away from the axis");
      Eigen::MatrixXd g = Eigen::MatrixXd::Identity(d, d);
      const double s2 = std::sinh(p.t) * std::sinh(p.t);
      for (int i = 1; i < d; ++i) g(i, i) = s2;
      return g;
    }
    case SpaceKind::ComplexHyperbolic2: {
      require_domain(p.t > 0.0,
                     "coordinate singularity at t = 0: use limiting values away from the axis");
      const Ch2Closed c = ch2_eval(p);
      Eigen::MatrixXd g = Eigen::MatrixXd::Identity(3, 3);
      g(1, 1) = c.sh * c.sh;
      g(2, 2) = c.st * c.st * c.sh2 * c.sh2 / 4.0 + c.ct * c.ct * c.sh * c.sh;
      return g;
    }
  }
  throw InvalidArgument("unknown backend kind");
}

Eigen::VectorXd section_w(const SpaceBackend& backend, const RadialCoord& p) {
  validate(p);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(backend.orbit_dim());
  if (backend.kind == SpaceKind::ComplexHyperbolic2) {
    const Ch2Closed c = ch2_eval(p);
    w[2] = 2.0 * c.st * c.ct * c.sh * c.sh * c.sh * c.ch / c.k2;
  }
  return w;
}

Eigen::MatrixXd orbit_metric(const SpaceBackend& backend, const RadialCoord& p) {
  Eigen::MatrixXd g = section_metric(backend, p);
  if (backend.kind == SpaceKind::ComplexHyperbolic2) {
    const double k = killing_norm(backend, p);
    const Eigen::VectorXd w = section_w(backend, p);
    g -= (k * k) * (w * w.transpose());
  }
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success)
    throw ConsistencyError("orbit metric is not positive definite (backend bug)");
  return g;
}

}  // namespace orbitsym
