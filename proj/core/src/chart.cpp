#include "orbitsym/chart.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace orbitsym {

namespace {

struct PointFields {
  Mat g;
  double k = 1.0;
  Vec w;
};

using FieldSampler = std::function<PointFields(const Vec&)>;

int axis_node_count(const Region& r, int a) {
  return r.cells[a] + (r.periodic_axis == a ? 0 : 1);
}

int node_id(const Region& r, const std::array<int, 3>& idx) {
  int id = 0;
  for (int a = r.dim - 1; a >= 0; --a) id = id * axis_node_count(r, a) + idx[a];
  return id;
}

// logical cell-corner index -> (node id, wrapped?) honoring the seam
std::pair<int, std::uint8_t> resolve(const Region& r, std::array<int, 3> idx) {
  std::uint8_t wrap = 0;
  if (r.periodic_axis >= 0 && idx[r.periodic_axis] == r.cells[r.periodic_axis]) {
    idx[r.periodic_axis] = 0;
    wrap = 1;
  }
  return {node_id(r, idx), wrap};
}

Grid build_grid(const Region& r) {
  require(r.dim == 2 || r.dim == 3, "grid dimension must be 2 or 3");
  for (int a = 0; a < r.dim; ++a) {
    require(r.cells[a] >= 4, "resolution must be at least 4 cells per axis");
    require(r.hi[a] > r.lo[a], "region extent must be positive");
  }
  require(r.periodic_axis < r.dim, "periodic axis out of range");

  Grid grid;
  grid.dim = r.dim;
  grid.region = r;
  int n_nodes = 1;
  for (int a = 0; a < r.dim; ++a) {
    grid.nodes_per_axis[a] = axis_node_count(r, a);
    grid.step[a] = (r.hi[a] - r.lo[a]) / r.cells[a];
    n_nodes *= grid.nodes_per_axis[a];
  }
  grid.coords.resize(static_cast<std::size_t>(n_nodes) * r.dim);
  std::array<int, 3> idx{0, 0, 0};
  const int n2 = (r.dim == 3) ? grid.nodes_per_axis[2] : 1;
  for (int k = 0; k < n2; ++k)
    for (int j = 0; j < grid.nodes_per_axis[1]; ++j)
      for (int i = 0; i < grid.nodes_per_axis[0]; ++i) {
        idx = {i, j, k};
        const int id = node_id(r, idx);
        for (int a = 0; a < r.dim; ++a)
          grid.coords[static_cast<std::size_t>(id) * r.dim + a] = r.lo[a] + idx[a] * grid.step[a];
      }

  if (r.periodic_axis >= 0)
    grid.seam = Seam{r.periodic_axis, r.hi[r.periodic_axis] - r.lo[r.periodic_axis]};

  // boundary nodes: extreme index on any non-periodic axis
  for (int id = 0; id < n_nodes; ++id) {
    int rest = id;
    bool boundary = false;
    for (int a = 0; a < r.dim; ++a) {
      const int ia = rest % grid.nodes_per_axis[a];
      rest /= grid.nodes_per_axis[a];
      if (a != r.periodic_axis && (ia == 0 || ia == grid.nodes_per_axis[a] - 1)) boundary = true;
    }
    if (boundary) grid.boundary_nodes.push_back(id);
  }

  // cells -> simplices with a fixed diagonal convention
  auto emit = [&](const std::array<std::array<int, 3>, 4>& corners, int nverts) {
    for (int v = 0; v < nverts; ++v) {
      auto [id, wrap] = resolve(r, corners[v]);
      grid.simplex_nodes.push_back(id);
      grid.simplex_wrap.push_back(wrap);
    }
  };

  if (r.dim == 2) {
    for (int j = 0; j < r.cells[1]; ++j)
      for (int i = 0; i < r.cells[0]; ++i) {
        const std::array<int, 3> c00{i, j, 0}, c10{i + 1, j, 0}, c01{i, j + 1, 0},
            c11{i + 1, j + 1, 0};
        emit({c00, c10, c11, {}}, 3);
        emit({c00, c11, c01, {}}, 3);
      }
  } else {
    // Kuhn subdivision: one tetrahedron per axis permutation, conforming
    // across neighboring cells.
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    static const bool odd[6] = {false, true, true, false, false, true};
    for (int k = 0; k < r.cells[2]; ++k)
      for (int j = 0; j < r.cells[1]; ++j)
        for (int i = 0; i < r.cells[0]; ++i)
          for (int p = 0; p < 6; ++p) {
            std::array<std::array<int, 3>, 4> verts;
            verts[0] = {i, j, k};
            for (int s = 0; s < 3; ++s) {
              verts[s + 1] = verts[s];
              verts[s + 1][perms[p][s]] += 1;
            }
            if (odd[p]) std::swap(verts[2], verts[3]);
            emit(verts, 4);
          }
  }

  // cached simplex geometry
  const int nv = r.dim + 1;
  const int n_simplices = static_cast<int>(grid.simplex_nodes.size()) / nv;
  grid.coord_volume.resize(n_simplices);
  grid.basis_grad.resize(n_simplices);
  grid.barycenter.resize(n_simplices);
  double dfact = (r.dim == 2) ? 2.0 : 6.0;
  for (int s = 0; s < n_simplices; ++s) {
    Mat edges(r.dim, r.dim);
    const Vec x0 = grid.vertex_coord(s, 0);
    Vec bary = x0;
    for (int v = 1; v < nv; ++v) {
      const Vec xv = grid.vertex_coord(s, v);
      edges.col(v - 1) = xv - x0;
      bary += xv;
    }
    grid.barycenter[s] = bary / nv;
    const double det = edges.determinant();
    require(det > 0.0, "simplex with nonpositive coordinate volume");
    grid.coord_volume[s] = det / dfact;
    const Mat inv_t = edges.inverse().transpose();
    BasisGrad& b = grid.basis_grad[s];
    b.resize(r.dim, nv);
    b.col(0).setZero();
    for (int v = 1; v < nv; ++v) {
      b.col(v) = inv_t.col(v - 1);
      b.col(0) -= b.col(v);
    }
  }
  return grid;
}

// 4th-order finite differences of the sampled w components; one-sided when
// the stencil would cross an axis validity bound (t >= 0 on polar charts).
Vec sample_dw(const std::function<Vec(const Vec&)>& w, const Vec& x, int dim,
              const std::array<double, 3>& lower_bound) {
  const double h = 1e-3;
  auto partial = [&](int a) -> Vec {
    Vec xp = x;
    if (x[a] - 2.0 * h >= lower_bound[a]) {
      Vec acc = Vec::Zero(dim);
      const double c[4] = {-1.0, 8.0, -8.0, 1.0};
      const double off[4] = {2.0, 1.0, -1.0, -2.0};
      for (int i = 0; i < 4; ++i) {
        xp[a] = x[a] + off[i] * h;
        acc += c[i] * w(xp);
      }
      return acc / (12.0 * h);
    }
    // forward stencil
    const double c[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};
    Vec acc = Vec::Zero(dim);
    for (int i = 0; i < 5; ++i) {
      xp[a] = x[a] + i * h;
      acc += c[i] * w(xp);
    }
    return acc / (12.0 * h);
  };
  if (dim == 2) {
    Vec dw(1);
    dw[0] = partial(0)[1] - partial(1)[0];
    return dw;
  }
  Vec dw(3);
  const Vec p0 = partial(0), p1 = partial(1), p2 = partial(2);
  dw[0] = p0[1] - p1[0];
  dw[1] = p0[2] - p2[0];
  dw[2] = p1[2] - p2[1];
  return dw;
}

Chart assemble_chart(Grid grid, const FieldSampler& sampler, const ScalarField& h,
                     const std::array<double, 3>& lower_bound, ChartMeta meta) {
  Chart chart;
  chart.grid = std::move(grid);
  chart.meta = std::move(meta);
  const Grid& g = chart.grid;
  FieldData& f = chart.fields;
  const int n = g.n_simplices();
  f.g.resize(n);
  f.g_inv.resize(n);
  f.k.resize(n);
  f.w.resize(n);
  f.dw.resize(n);
  f.weight.resize(n);
  f.h.resize(n);
  f.h_node.resize(g.n_nodes());

  for (int i = 0; i < g.n_nodes(); ++i) {
    const double hv = h(g.node(i));
    require(std::isfinite(hv) && hv >= 0.0, "thickness h must be finite and nonnegative");
    f.h_node[i] = hv;
  }

  auto w_of = [&](const Vec& x) { return sampler(x).w; };
  const int nv = g.dim + 1;
  for (int s = 0; s < n; ++s) {
    const Vec& x = g.barycenter[s];
    PointFields pf = sampler(x);
    if ((pf.g - pf.g.transpose()).norm() > 1e-12 * pf.g.norm())
      throw ConsistencyError("sampled metric is not symmetric");
    Eigen::LLT<Mat> llt(pf.g);
    if (llt.info() != Eigen::Success)
      throw ConsistencyError("sampled metric is not positive definite at simplex " +
                             std::to_string(s));
    if (pf.k < 1.0 - 1e-12)
      throw ConsistencyError("sampled k < 1 at simplex " + std::to_string(s));
    f.g[s] = pf.g;
    f.g_inv[s] = pf.g.inverse();
    f.k[s] = std::max(pf.k, 1.0);
    f.w[s] = pf.w;
    f.dw[s] = sample_dw(w_of, x, g.dim, lower_bound);
    f.weight[s] = std::sqrt(pf.g.determinant()) * g.coord_volume[s];
    require(f.weight[s] > 0.0, "volume weight must be positive");
    double hb = 0.0;
    for (int v = 0; v < nv; ++v) hb += f.h_node[g.simplex_nodes[s * nv + v]];
    f.h[s] = hb / nv;
  }
  return chart;
}

}  // namespace

Vec Grid::node(int i) const {
  Vec x(dim);
  for (int a = 0; a < dim; ++a) x[a] = coords[static_cast<std::size_t>(i) * dim + a];
  return x;
}

Vec Grid::vertex_coord(int simplex, int vertex) const {
  const int nv = dim + 1;
  const int id = simplex_nodes[simplex * nv + vertex];
  Vec x = node(id);
  if (seam && simplex_wrap[simplex * nv + vertex]) x[seam->axis] += seam->span;
  return x;
}

Chart build_chart(const SpaceBackend& backend, ChartModel model, const Region& region,
                  const ScalarField& h, double theta0) {
  std::array<double, 3> lb{-std::numeric_limits<double>::infinity(),
                           -std::numeric_limits<double>::infinity(),
                           -std::numeric_limits<double>::infinity()};
  ChartMeta meta;
  meta.region = region;
  meta.ambient_dim = backend.ambient_dim;
  meta.theta0 = theta0;
  FieldSampler sampler;

  auto radial_guard = [&] {
    require_domain(region.lo[0] >= 0.0, "region touches t < 0");
    // exclude a thin disc around the coordinate singularity unless the region
    // explicitly contains the axis (then barycenter limits take over)
    require(region.lo[0] == 0.0 || region.lo[0] >= 1e-3,
            "radial charts start at the axis or at least 1e-3 away from it");
    lb[0] = 0.0;
  };

  switch (model) {
    case ChartModel::Cartesian: {
      require(backend.kind == SpaceKind::Euclidean, "cartesian chart needs the euclidean backend");
      require(backend.orbit_dim() == region.dim,
              "chart dimension must match the orbit-space dimension");
      meta.model = "cartesian";
      meta.backend = "euclidean";
      const int d = region.dim;
      sampler = [d](const Vec&) {
        PointFields pf;
        pf.g = Mat::Identity(d, d);
        pf.k = 1.0;
        pf.w = Vec::Zero(d);
        return pf;
      };
      break;
    }
    case ChartModel::HyperbolicPolar: {
      require(backend.kind == SpaceKind::RealHyperbolic && backend.ambient_dim == 3,
              "hyperbolic polar chart needs the real hyperbolic backend in ambient dimension 3");
      require(region.dim == 2, "hyperbolic polar chart is 2-dimensional (t, phi)");
      radial_guard();
      meta.model = "hyperbolic_polar";
      meta.backend = "real_hyperbolic";
      sampler = [](const Vec& x) {
        PointFields pf;
        pf.g = Mat::Identity(2, 2);
        pf.g(1, 1) = std::sinh(x[0]) * std::sinh(x[0]);
        pf.k = std::cosh(x[0]);
        pf.w = Vec::Zero(2);
        return pf;
      };
      break;
    }
    case ChartModel::CH2Meridian: {
      require(backend.kind == SpaceKind::ComplexHyperbolic2, "ch2 chart needs the ch2 backend");
      require(region.dim == 2, "meridian chart is 2-dimensional (t, theta)");
      radial_guard();
      meta.model = "ch2_meridian";
      meta.backend = "complex_hyperbolic2";
      sampler = [backend](const Vec& x) {
        PointFields pf;
        pf.g = Mat::Identity(2, 2);
        pf.g(1, 1) = std::sinh(x[0]) * std::sinh(x[0]);
        pf.k = killing_norm(backend, {x[0], x[1]});
        pf.w = Vec::Zero(2);  // w has no (t, theta) components
        return pf;
      };
      break;
    }
    case ChartModel::CH2Cone: {
      require(backend.kind == SpaceKind::ComplexHyperbolic2, "ch2 chart needs the ch2 backend");
      require(region.dim == 2, "cone chart is 2-dimensional (t, phi)");
      require(theta0 > 0.0 && theta0 <= M_PI / 2.0, "cone slice angle must lie in (0, pi/2]");
      radial_guard();
      meta.model = "ch2_cone";
      meta.backend = "complex_hyperbolic2";
      const double st0 = std::sin(theta0);
      sampler = [backend, theta0, st0](const Vec& x) {
        const RadialCoord p{x[0], theta0};
        PointFields pf;
        const Eigen::MatrixXd og = orbit_metric(backend, p);
        pf.g = Mat::Identity(2, 2);
        pf.g(1, 1) = st0 * st0 * og(2, 2);
        pf.k = killing_norm(backend, p);
        pf.w = Vec::Zero(2);
        pf.w[1] = -st0 * section_w(backend, p)[2];
        return pf;
      };
      break;
    }
    case ChartModel::CH2Full: {
      require(backend.kind == SpaceKind::ComplexHyperbolic2, "ch2 chart needs the ch2 backend");
      require(region.dim == 3, "full ch2 chart is 3-dimensional (t, theta, phi)");
      require(region.lo[1] > 0.0 && region.hi[1] < M_PI,
              "theta range must avoid the polar degeneracies 0 and pi");
      radial_guard();
      meta.model = "ch2_full";
      meta.backend = "complex_hyperbolic2";
      sampler = [backend](const Vec& x) {
        const RadialCoord p{x[0], x[1]};
        const double st = std::sin(x[1]);
        PointFields pf;
        const Eigen::MatrixXd og = orbit_metric(backend, p);
        pf.g = Mat::Identity(3, 3);
        pf.g(1, 1) = og(1, 1);
        pf.g(2, 2) = st * st * og(2, 2);
        pf.k = killing_norm(backend, p);
        pf.w = Vec::Zero(3);
        pf.w[2] = -st * section_w(backend, p)[2];
        return pf;
      };
      break;
    }
  }
  return assemble_chart(build_grid(region), sampler, h, lb, std::move(meta));
}

Chart build_synthetic_chart(const Region& region, const ScalarField& h,
                            const CovectorField& w, const std::string& tag) {
  ChartMeta meta;
  meta.model = "synthetic";
  meta.backend = "none";
  meta.region = region;
  meta.tag = tag;
  const int d = region.dim;
  FieldSampler sampler = [d, w](const Vec& x) {
    PointFields pf;
    pf.g = Mat::Identity(d, d);
    pf.k = 1.0;
    pf.w = w(x);
    return pf;
  };
  std::array<double, 3> lb{-std::numeric_limits<double>::infinity(),
                           -std::numeric_limits<double>::infinity(),
                           -std::numeric_limits<double>::infinity()};
  return assemble_chart(build_grid(region), sampler, h, lb, std::move(meta));
}

std::vector<Vec> discrete_gradient(const Grid& grid, const NodalFunction& u) {
  require(u.values.size() == grid.n_nodes(), "nodal function size mismatch");
  const int nv = grid.dim + 1;
  const double jump = u.winding * u.period;
  std::vector<Vec> du(grid.n_simplices());
  for (int s = 0; s < grid.n_simplices(); ++s) {
    // difference form: constants drop out exactly
    const double v0 = u.values[grid.simplex_nodes[s * nv]] +
                      (grid.simplex_wrap[s * nv] ? jump : 0.0);
    Vec acc = Vec::Zero(grid.dim);
    for (int v = 1; v < nv; ++v) {
      const double val = u.values[grid.simplex_nodes[s * nv + v]] +
                         (grid.simplex_wrap[s * nv + v] ? jump : 0.0);
      acc += grid.basis_grad[s].col(v) * (val - v0);
    }
    du[s] = acc;
  }
  return du;
}

double integrate(const Grid& grid, const FieldData& fields,
                 const std::vector<double>& per_simplex) {
  require(static_cast<int>(per_simplex.size()) == grid.n_simplices(),
          "integrand size mismatch");
  double sum = 0.0;
  for (int s = 0; s < grid.n_simplices(); ++s) {
    if (!std::isfinite(per_simplex[s])) {
      std::ostringstream os;
      os << "non-finite integrand at simplex " << s;
      throw InvalidArgument(os.str());
    }
    sum += per_simplex[s] * fields.weight[s];
  }
  return sum;
}

double loop_holonomy(const Grid& grid, const FieldData& fields,
                     const std::vector<int>& loop) {
  require(loop.size() >= 3, "loop must have at least 3 nodes");
  // edge -> adjacent simplices
  std::map<std::pair<int, int>, std::vector<int>> edges;
  const int nv = grid.dim + 1;
  for (int s = 0; s < grid.n_simplices(); ++s)
    for (int a = 0; a < nv; ++a)
      for (int b = a + 1; b < nv; ++b) {
        int na = grid.simplex_nodes[s * nv + a], nb = grid.simplex_nodes[s * nv + b];
        edges[{std::min(na, nb), std::max(na, nb)}].push_back(s);
      }

  double total = 0.0;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const int a = loop[i], b = loop[(i + 1) % n];
    require(a != b, "degenerate loop edge");
    auto it = edges.find({std::min(a, b), std::max(a, b)});
    if (it == edges.end()) throw InvalidArgument("open path: consecutive loop nodes are not an edge");
    Vec w_avg = Vec::Zero(grid.dim);
    for (int s : it->second) w_avg += fields.w[s];
    w_avg /= static_cast<double>(it->second.size());
    Vec delta = grid.node(b) - grid.node(a);
    if (grid.seam) {
      const int ax = grid.seam->axis;
      if (delta[ax] > 0.5 * grid.seam->span) delta[ax] -= grid.seam->span;
      if (delta[ax] < -0.5 * grid.seam->span) delta[ax] += grid.seam->span;
    }
    total += w_avg.dot(delta);
  }
  return total;
}

double dw_integral(const Grid& grid, const FieldData& fields, const Vec& lo, const Vec& hi,
                   int axis_a, int axis_b) {
  require(grid.dim == 2, "dw_integral is defined for 2-dimensional charts");
  require((axis_a == 0 && axis_b == 1) || (axis_a == 1 && axis_b == 0),
          "axes must name the two chart directions");
  const double sign = (axis_a == 0) ? 1.0 : -1.0;
  double total = 0.0;
  for (int s = 0; s < grid.n_simplices(); ++s) {
    const Vec& x = grid.barycenter[s];
    bool inside = true;
    for (int a = 0; a < grid.dim; ++a)
      if (x[a] < lo[a] || x[a] > hi[a]) inside = false;
    if (inside) total += sign * fields.dw[s][0] * grid.coord_volume[s];
  }
  return total;
}

Eigen::VectorXd lumped_weights(const Grid& grid, const FieldData& fields) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(grid.n_nodes());
  const int nv = grid.dim + 1;
  for (int s = 0; s < grid.n_simplices(); ++s)
    for (int v = 0; v < nv; ++v)
      w[grid.simplex_nodes[s * nv + v]] += fields.weight[s] / nv;
  return w;
}

double weighted_mean(const Grid& grid, const FieldData& fields, const NodalFunction& u) {
  const Eigen::VectorXd w = lumped_weights(grid, fields);
  return w.dot(u.values) / w.sum();
}

void project_mean_zero(const Grid& grid, const FieldData& fields, NodalFunction& u) {
  u.values.array() -= weighted_mean(grid, fields, u);
}

std::vector<int> seam_loop(const Grid& grid, const std::vector<double>& fixed_coords) {
  require(grid.seam.has_value(), "seam loop requires a periodic chart");
  const int p = grid.seam->axis;
  std::array<int, 3> idx{0, 0, 0};
  int fi = 0;
  for (int a = 0; a < grid.dim; ++a) {
    if (a == p) continue;
    require(fi < static_cast<int>(fixed_coords.size()),
            "need one fixed coordinate per non-periodic axis");
    const double rel = (fixed_coords[fi] - grid.region.lo[a]) / grid.step[a];
    idx[a] = std::clamp(static_cast<int>(std::lround(rel)), 0, grid.nodes_per_axis[a] - 1);
    ++fi;
  }
  std::vector<int> loop;
  loop.reserve(grid.nodes_per_axis[p]);
  for (int i = 0; i < grid.nodes_per_axis[p]; ++i) {
    idx[p] = i;
    loop.push_back(node_id(grid.region, idx));
  }
  return loop;
}

}  // namespace orbitsym
