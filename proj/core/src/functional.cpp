#include "orbitsym/functional.hpp"

#include <cmath>

namespace orbitsym {

namespace {

double norm_sq(const Mat& g_inv, const Vec& v) { return v.dot(g_inv * v); }

}  // namespace

double f_value(const PointKernel& q, const Vec& du) {
  const Vec op = q.w + q.dh + du;
  const Vec om = q.w - q.dh + du;
  const double k2 = q.k * q.k;
  return std::sqrt(1.0 + k2 * norm_sq(q.g_inv, op)) +
         std::sqrt(1.0 + k2 * norm_sq(q.g_inv, om));
}

Vec df_covector(const PointKernel& q, const Vec& du, double eps) {
  const Vec op = q.w + q.dh + du;
  const Vec om = q.w - q.dh + du;
  const double k2 = q.k * q.k;
  const double sp = std::sqrt(1.0 + k2 * norm_sq(q.g_inv, op));
  const double sm = std::sqrt(1.0 + k2 * norm_sq(q.g_inv, om));
  return k2 * (op / sp + om / sm) + 2.0 * eps * du;
}

Mat ddf_matrix(const PointKernel& q, const Vec& du, double eps) {
  const Vec op = q.w + q.dh + du;
  const Vec om = q.w - q.dh + du;
  const double k2 = q.k * q.k;
  const double sp = std::sqrt(1.0 + k2 * norm_sq(q.g_inv, op));
  const double sm = std::sqrt(1.0 + k2 * norm_sq(q.g_inv, om));
  Mat m = k2 * q.g * (1.0 / sp + 1.0 / sm) + 2.0 * eps * q.g;
  m -= (k2 * k2 / (sp * sp * sp)) * (op * op.transpose());
  m -= (k2 * k2 / (sm * sm * sm)) * (om * om.transpose());
  return m;
}

double ddf_apply(const PointKernel& q, const Vec& du, const Vec& x, double eps) {
  return x.dot(ddf_matrix(q, du, eps) * x);
}

ProjectionNorms projection_norms(const PointKernel& q, const Vec& du, const Vec& x) {
  const double k2 = q.k * q.k;
  const double nx = x.dot(q.g * x);
  auto proj = [&](const Vec& omega) {
    const double pairing = q.k * omega.dot(x);  // <V, x> with V = k g^{-1} omega
    return nx - pairing * pairing / (1.0 + k2 * norm_sq(q.g_inv, omega));
  };
  ProjectionNorms p;
  p.p_sq = proj(q.w + du);
  p.p_plus_sq = proj(q.w + q.dh + du);
  p.p_minus_sq = proj(q.w - q.dh + du);
  return p;
}

EllipticityBounds ellipticity_bounds(const PointKernel& q) {
  const double k2 = q.k * q.k;
  const double tw = 1.0 + k2 * norm_sq(q.g_inv, q.w);
  const double th = 1.0 + k2 * norm_sq(q.g_inv, q.dh);
  EllipticityBounds b;
  b.mu1 = q.k / (2.0 * std::sqrt(tw) * th * std::sqrt(th));
  b.mu2 = 16.0 * k2 * std::sqrt(tw) * th * th * std::sqrt(th);
  return b;
}

DomainSpec::DomainSpec(const Chart& chart, NodalFunction h, NodalFunction u)
    : chart_(&chart), h_(std::move(h)), u_(std::move(u)) {
  require(h_.values.size() == chart.grid.n_nodes(), "h size mismatch");
  require(u_.values.size() == chart.grid.n_nodes(), "u size mismatch");
  require(h_.winding == 0, "half-thickness h cannot wind");
  require(h_.values.minCoeff() >= 0.0, "half-thickness h must be nonnegative");
  dh_ = discrete_gradient(chart.grid, h_);
  h_bary_.resize(chart.grid.n_simplices());
  const int nv = chart.grid.dim + 1;
  for (int s = 0; s < chart.grid.n_simplices(); ++s) {
    double acc = 0.0;
    for (int v = 0; v < nv; ++v) acc += h_.values[chart.grid.simplex_nodes[s * nv + v]];
    h_bary_[s] = acc / nv;
  }
}

PointKernel DomainSpec::kernel(int s) const {
  const FieldData& f = chart_->fields;
  return PointKernel{f.g[s], f.g_inv[s], f.k[s], f.w[s], dh_[s]};
}

DomainSpec make_spec(const Chart& chart) {
  NodalFunction h{Eigen::Map<const Eigen::VectorXd>(chart.fields.h_node.data(),
                                                    chart.grid.n_nodes()),
                  0, 0.0};
  return DomainSpec(chart, std::move(h), NodalFunction::zero(chart.grid.n_nodes()));
}

double graph_area(const Chart& chart, const NodalFunction& u) {
  const auto du = discrete_gradient(chart.grid, u);
  const FieldData& f = chart.fields;
  double total = 0.0;
  for (int s = 0; s < chart.grid.n_simplices(); ++s) {
    const Vec omega = f.w[s] + du[s];
    const double k2 = f.k[s] * f.k[s];
    total += std::sqrt(1.0 + k2 * omega.dot(f.g_inv[s] * omega)) * f.weight[s];
  }
  return total;
}

double area(const DomainSpec& spec) { return area_eps(spec, 0.0); }

double area_eps(const DomainSpec& spec, double eps) {
  require(eps >= 0.0, "regularization parameter must be nonnegative");
  const Chart& chart = spec.chart();
  const auto du = discrete_gradient(chart.grid, spec.u());
  double total = 0.0;
  for (int s = 0; s < chart.grid.n_simplices(); ++s) {
    const PointKernel q = spec.kernel(s);
    double v = f_value(q, du[s]);
    if (eps > 0.0) v += eps * du[s].dot(q.g_inv * du[s]);
    total += v * chart.fields.weight[s];
  }
  return total;
}

Eigen::VectorXd first_variation(const DomainSpec& spec, double eps) {
  require(eps >= 0.0, "regularization parameter must be nonnegative");
  const Chart& chart = spec.chart();
  const Grid& grid = chart.grid;
  const auto du = discrete_gradient(grid, spec.u());
  Eigen::VectorXd r = Eigen::VectorXd::Zero(grid.n_nodes());
  const int nv = grid.dim + 1;
  for (int s = 0; s < grid.n_simplices(); ++s) {
    const PointKernel q = spec.kernel(s);
    // covector paired with g^{-1} grad(phi_i); eps term included
    const Vec rc = q.g_inv * df_covector(q, du[s], eps) * chart.fields.weight[s];
    for (int v = 0; v < nv; ++v)
      r[grid.simplex_nodes[s * nv + v]] += rc.dot(grid.basis_grad[s].col(v));
  }
  return r;
}

Eigen::VectorXd second_variation_apply(const DomainSpec& spec, double eps,
                                       const NodalFunction& direction) {
  require(direction.winding == 0, "variation directions cannot wind");
  const Chart& chart = spec.chart();
  const Grid& grid = chart.grid;
  const auto du = discrete_gradient(grid, spec.u());
  const auto dv = discrete_gradient(grid, direction);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(grid.n_nodes());
  const int nv = grid.dim + 1;
  for (int s = 0; s < grid.n_simplices(); ++s) {
    const PointKernel q = spec.kernel(s);
    const Mat m = ddf_matrix(q, du[s], eps);
    const Vec mx = q.g_inv * (m * (q.g_inv * dv[s])) * chart.fields.weight[s];
    for (int v = 0; v < nv; ++v)
      r[grid.simplex_nodes[s * nv + v]] += mx.dot(grid.basis_grad[s].col(v));
  }
  return r;
}

Eigen::SparseMatrix<double> second_variation_matrix(const DomainSpec& spec, double eps) {
  const Chart& chart = spec.chart();
  const Grid& grid = chart.grid;
  const auto du = discrete_gradient(grid, spec.u());
  const int nv = grid.dim + 1;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(grid.n_simplices()) * nv * nv);
  for (int s = 0; s < grid.n_simplices(); ++s) {
    const PointKernel q = spec.kernel(s);
    const Mat m = ddf_matrix(q, du[s], eps);
    // element matrix: ddf(grad phi_i, grad phi_j) * weight
    for (int a = 0; a < nv; ++a) {
      const Vec ga = q.g_inv * grid.basis_grad[s].col(a);
      const Vec mga = m * ga;
      for (int b = 0; b < nv; ++b) {
        const double val = mga.dot(q.g_inv * grid.basis_grad[s].col(b)) * chart.fields.weight[s];
        triplets.emplace_back(grid.simplex_nodes[s * nv + a], grid.simplex_nodes[s * nv + b],
                              val);
      }
    }
  }
  Eigen::SparseMatrix<double> h(grid.n_nodes(), grid.n_nodes());
  h.setFromTriplets(triplets.begin(), triplets.end());
  return h;
}

std::vector<ProjectionNorms> projections(const DomainSpec& spec, const std::vector<Vec>& x) {
  const int n = spec.chart().grid.n_simplices();
  require(static_cast<int>(x.size()) == n, "need one direction per simplex");
  const auto du = discrete_gradient(spec.chart().grid, spec.u());
  std::vector<ProjectionNorms> out(n);
  for (int s = 0; s < n; ++s) out[s] = projection_norms(spec.kernel(s), du[s], x[s]);
  return out;
}

std::vector<EllipticityBounds> ellipticity_bounds(const DomainSpec& spec) {
  std::vector<EllipticityBounds> out(spec.chart().grid.n_simplices());
  for (int s = 0; s < spec.chart().grid.n_simplices(); ++s)
    out[s] = ellipticity_bounds(spec.kernel(s));
  return out;
}

}  // namespace orbitsym
