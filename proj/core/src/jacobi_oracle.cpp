#include "orbitsym/jacobi_oracle.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace orbitsym {

namespace {

// Second-order Jacobi systems J'' = -R(J,c')c' in a parallel frame where the
// curvature operator is diagonal.  State per field: (J, J').
template <int N>
struct JacobiSystem {
  using VecN = Eigen::Matrix<double, N, 1>;
  VecN eigenvalues;  // of R(., c')c'
  std::vector<std::pair<VecN, VecN>> fields;

  void rk4_step(double h) {
    auto acc = [&](const VecN& j) -> VecN { return -eigenvalues.cwiseProduct(j); };
    for (auto& [j, jp] : fields) {
      const VecN k1j = jp, k1p = acc(j);
      const VecN k2j = jp + 0.5 * h * k1p, k2p = acc(j + 0.5 * h * k1j);
      const VecN k3j = jp + 0.5 * h * k2p, k3p = acc(j + 0.5 * h * k2j);
      const VecN k4j = jp + h * k3p, k4p = acc(j + h * k3j);
      j += h / 6.0 * (k1j + 2.0 * k2j + 2.0 * k3j + k4j);
      jp += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    }
  }
};

// Unit normal of the span of the given columns, with sign fixed by a
// reference direction.
template <int N>
Eigen::Matrix<double, N, 1> unit_normal(const Eigen::Matrix<double, N, Eigen::Dynamic>& span,
                                        const Eigen::Matrix<double, N, 1>& reference) {
  Eigen::JacobiSVD<Eigen::Matrix<double, N, Eigen::Dynamic>> svd(
      span, Eigen::ComputeFullU);
  Eigen::Matrix<double, N, 1> nu = svd.matrixU().col(N - 1);
  if (nu.dot(reference) < 0.0) nu = -nu;
  return nu;
}

}  // namespace

std::vector<OracleSample> ch2_oracle(double theta, const std::vector<double>& t_values,
                                     double step) {
  require(step > 0.0, "oracle step must be positive");
  // Frame order: (X1, JX1 = radial, X2, JX2), eigenvalues (-4, 0, -1, -1).
  JacobiSystem<4> sys;
  sys.eigenvalues << -4.0, 0.0, -1.0, -1.0;
  const double st = std::sin(theta), ct = std::cos(theta);
  using V4 = Eigen::Vector4d;
  // Killing field: J(0) = geodesic direction of the transvection, J'(0) = 0.
  sys.fields.push_back({V4(ct, 0.0, st, 0.0), V4::Zero()});
  // Angular Jacobi fields of the section frame: J(0) = 0, unit J'(0).
  sys.fields.push_back({V4::Zero(), V4(0.0, 0.0, 0.0, -1.0)});
  sys.fields.push_back({V4::Zero(), V4(st, 0.0, -ct, 0.0)});

  const V4 radial(0.0, 1.0, 0.0, 0.0);
  std::vector<OracleSample> out;
  out.reserve(t_values.size());
  double t = 0.0;
  for (double target : t_values) {
    require(target >= t - 1e-15, "oracle t values must be sorted and nonnegative");
    while (t < target - 0.5 * step) {
      sys.rk4_step(step);
      t += step;
    }
    if (target - t > 1e-15) {  // fractional final step onto the sample point
      sys.rk4_step(target - t);
      t = target;
    }

    const V4& K = sys.fields[0].first;
    const V4& j_theta = sys.fields[1].first;
    const V4& j_azim = sys.fields[2].first;

    OracleSample s;
    s.t = t;
    s.k = K.norm();
    Eigen::Matrix<double, 4, Eigen::Dynamic> span(4, 3);
    span.col(0) = radial;
    // normalized angular fields; at the axis the limits are the initial velocities
    span.col(1) = j_theta.norm() > 0.0 ? j_theta.normalized() : V4(0.0, 0.0, 0.0, -1.0);
    span.col(2) = j_azim.norm() > 0.0 ? j_azim.normalized() : V4(st, 0.0, -ct, 0.0);
    const V4 nu = unit_normal<4>(span, K);
    s.normal_inner = K.dot(nu);
    const V4 horw = K / (s.k * s.k) - nu / s.normal_inner;
    s.hor_w = Eigen::Vector2d(horw[0], horw[2]);
    s.hor_w_radial = horw[1];
    s.section_gram = Eigen::Vector3d(1.0, j_theta.squaredNorm(), j_azim.squaredNorm());
    s.w_frame = j_azim.dot(K) / K.squaredNorm();
    out.push_back(s);
  }
  return out;
}

std::vector<OracleSample> constant_curvature_oracle(SpaceKind kind,
                                                    const std::vector<double>& t_values,
                                                    double step) {
  require(kind != SpaceKind::ComplexHyperbolic2,
          "constant-curvature oracle handles euclidean and real hyperbolic only");
  // 3-frame (axis direction, radial, one sphere direction); all curvature
  // eigenvalues equal -1 (hyperbolic) or 0 (euclidean).
  const double lambda = (kind == SpaceKind::RealHyperbolic) ? -1.0 : 0.0;
  JacobiSystem<3> sys;
  sys.eigenvalues << lambda, 0.0, lambda;
  using V3 = Eigen::Vector3d;
  sys.fields.push_back({V3(1.0, 0.0, 0.0), V3::Zero()});  // Killing field
  sys.fields.push_back({V3::Zero(), V3(0.0, 0.0, 1.0)});  // angular Jacobi field

  const V3 radial(0.0, 1.0, 0.0);
  std::vector<OracleSample> out;
  out.reserve(t_values.size());
  double t = 0.0;
  for (double target : t_values) {
    require(target >= t - 1e-15, "oracle t values must be sorted and nonnegative");
    while (t < target - 0.5 * step) {
      sys.rk4_step(step);
      t += step;
    }
    if (target - t > 1e-15) {
      sys.rk4_step(target - t);
      t = target;
    }
    const V3& K = sys.fields[0].first;
    const V3& j_ang = sys.fields[1].first;
    OracleSample s;
    s.t = t;
    s.k = K.norm();
    Eigen::Matrix<double, 3, Eigen::Dynamic> span(3, 2);
    span.col(0) = radial;
    span.col(1) = j_ang.norm() > 0.0 ? j_ang.normalized() : V3(0.0, 0.0, 1.0);
    const V3 nu = unit_normal<3>(span, K);
    s.normal_inner = K.dot(nu);
    const V3 horw = K / (s.k * s.k) - nu / s.normal_inner;
    s.hor_w = Eigen::Vector2d(horw[0], horw[2]);
    s.hor_w_radial = horw[1];
    s.section_gram = Eigen::Vector3d(1.0, j_ang.squaredNorm(), 0.0);
    out.push_back(s);
  }
  return out;
}

}  // namespace orbitsym
