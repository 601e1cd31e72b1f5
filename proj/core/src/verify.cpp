#include "orbitsym/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "orbitsym/functional.hpp"
#include "orbitsym/jacobi_oracle.hpp"
#include "orbitsym/solver.hpp"
#include "orbitsym/symmetrize.hpp"

namespace orbitsym {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(unsigned seed) : gen(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen); }
};

Mat random_spd(Rng& rng, int d) {
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ() * Mat::Identity(d, d);
  Mat lam = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) lam(i, i) = rng.uniform(0.3, 3.0);
  return q * lam * q.transpose();
}

Vec random_covector(Rng& rng, int d, double scale) {
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = scale * rng.normal();
  return v;
}

PointKernel random_kernel(Rng& rng, int d) {
  PointKernel q;
  q.g = random_spd(rng, d);
  q.g_inv = q.g.inverse();
  q.k = std::exp(rng.uniform(0.0, 1.5));
  q.w = random_covector(rng, d, rng.uniform(0.0, 2.0));
  q.dh = random_covector(rng, d, rng.uniform(0.0, 2.0));
  return q;
}

// Smooth random field, periodic along any axis in normalized coordinates.
ScalarField random_smooth_field(Rng& rng, const Region& region, double base, double amp) {
  struct Term {
    double c;
    std::array<int, 3> freq;
    std::array<double, 3> phase;
  };
  std::vector<Term> terms(3);
  for (auto& t : terms) {
    t.c = rng.uniform(-1.0, 1.0);
    for (int a = 0; a < 3; ++a) {
      t.freq[a] = rng.integer(1, 2);
      t.phase[a] = rng.uniform(0.0, 2.0 * kPi);
    }
  }
  return [terms, region, base, amp](const Vec& x) {
    double v = base;
    for (const auto& t : terms) {
      double prod = t.c;
      for (int a = 0; a < region.dim; ++a) {
        const double xi = (x[a] - region.lo[a]) / (region.hi[a] - region.lo[a]);
        prod *= std::sin(2.0 * kPi * t.freq[a] * xi + t.phase[a]);
      }
      v += amp * prod;
    }
    return v;
  };
}

NodalFunction sample_nodal(const Grid& grid, const ScalarField& field) {
  NodalFunction u = NodalFunction::zero(grid.n_nodes());
  for (int i = 0; i < grid.n_nodes(); ++i) u.values[i] = field(grid.node(i));
  return u;
}

int nearest_node(const Grid& grid, const Vec& x) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.n_nodes(); ++i) {
    const double d = (grid.node(i) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

// ---- standard instances -------------------------------------------------

Region square_region(int n) {
  Region r;
  r.dim = 2;
  r.lo = {0.0, 0.0, 0.0};
  r.hi = {1.0, 1.0, 0.0};
  r.cells = {n, n, 0};
  return r;
}

Chart euclidean_chart(int n, const ScalarField& h) {
  return build_chart(SpaceBackend::euclidean(3), ChartModel::Cartesian, square_region(n), h);
}

Chart hyperbolic_chart(int n, const ScalarField& h) {
  Region r;
  r.dim = 2;
  r.lo = {0.5, 0.0, 0.0};
  r.hi = {1.5, 1.0, 0.0};
  r.cells = {n, n, 0};
  return build_chart(SpaceBackend::real_hyperbolic(3), ChartModel::HyperbolicPolar, r, h);
}

double manufactured_v(const Vec& x) {
  return std::sin(kPi * x[0]) * std::sin(kPi * x[1]) / 10.0;
}

Chart manufactured_chart(int n, const ScalarField& h) {
  CovectorField w = [](const Vec& x) {
    Vec v(2);
    v[0] = kPi / 10.0 * std::cos(kPi * x[0]) * std::sin(kPi * x[1]);
    v[1] = kPi / 10.0 * std::sin(kPi * x[0]) * std::cos(kPi * x[1]);
    return v;
  };
  return build_synthetic_chart(square_region(n), h, w, "exact-gradient");
}

Chart holonomy_annulus(int n, double total_holonomy, const ScalarField& h) {
  Region r = square_region(n);
  r.periodic_axis = 1;
  CovectorField w = [total_holonomy](const Vec&) {
    Vec v(2);
    v[0] = 0.0;
    v[1] = total_holonomy;  // unit period: loop integral equals total_holonomy
    return v;
  };
  return build_synthetic_chart(r, h, w, "uniform-holonomy");
}

Chart exact_form_annulus(int n, const ScalarField& h) {
  Region r = square_region(n);
  r.periodic_axis = 1;
  CovectorField w = [](const Vec& x) {
    Vec v(2);
    v[0] = 0.0;
    v[1] = 0.4 * kPi * std::cos(2.0 * kPi * x[1]);  // d(0.2 sin(2 pi y))
    return v;
  };
  return build_synthetic_chart(r, h, w, "exact-form-control");
}

Chart ch2_cone_annulus(int nt, int nphi, const ScalarField& h) {
  Region r;
  r.dim = 2;
  r.lo = {0.6, 0.0, 0.0};
  r.hi = {1.4, 2.0 * kPi, 0.0};
  r.cells = {nt, nphi, 0};
  r.periodic_axis = 1;
  return build_chart(SpaceBackend::complex_hyperbolic2(), ChartModel::CH2Cone, r, h, kPi / 4.0);
}

// ---- the checks ----------------------------------------------------------

CheckResult check_geometry_oracle(unsigned seed, int) {
  (void)seed;
  CheckResult res{"geometry_oracle", true, 0.0, ""};
  const SpaceBackend backend = SpaceBackend::complex_hyperbolic2();
  std::vector<double> ts;
  for (int i = 0; i <= 30; ++i) ts.push_back(0.1 * i);
  double worst = 0.0;
  for (int j = 0; j < 32; ++j) {
    const double theta = (kPi / 2.0) * j / 31.0;
    const auto samples = ch2_oracle(theta, ts, 1e-4);
    for (const auto& s : samples) {
      const RadialCoord p{s.t, theta};
      const double k = killing_norm(backend, p);
      const double kn = normal_inner(backend, p);
      const Eigen::Vector2d hw = hor_w(backend, p);
      worst = std::max(worst, std::abs(s.k - k) / k);
      worst = std::max(worst, std::abs(s.normal_inner - kn) / kn);
      worst = std::max(worst, (s.hor_w - hw).norm() / std::max(hw.norm(), 1.0));
      if (s.t >= 0.1) {
        const Eigen::MatrixXd gram = section_metric(backend, p);
        const Eigen::VectorXd wf = section_w(backend, p);
        worst = std::max(worst,
                         std::abs(s.section_gram[1] - gram(1, 1)) / std::max(gram(1, 1), 1.0));
        worst = std::max(worst,
                         std::abs(s.section_gram[2] - gram(2, 2)) / std::max(gram(2, 2), 1.0));
        worst = std::max(worst, std::abs(s.w_frame - wf[2]) / std::max(std::abs(wf[2]), 1.0));
      }
    }
  }
  res.value = worst;
  res.pass = worst <= 1e-8;
  std::ostringstream os;
  os << "max relative deviation from the ODE oracle over t in [0,3] x 32 angles: " << worst;
  res.detail = os.str();
  return res;
}

CheckResult check_constant_curvature_w(unsigned, int) {
  CheckResult res{"constant_curvature_w", true, 0.0, ""};
  std::vector<double> ts;
  for (int i = 0; i <= 30; ++i) ts.push_back(0.1 * i);
  double worst = 0.0;
  for (SpaceKind kind : {SpaceKind::Euclidean, SpaceKind::RealHyperbolic}) {
    for (const auto& s : constant_curvature_oracle(kind, ts, 1e-4))
      worst = std::max(worst, s.hor_w.norm());
    const SpaceBackend b =
        kind == SpaceKind::Euclidean ? SpaceBackend::euclidean(3) : SpaceBackend::real_hyperbolic(3);
    for (double t : ts) worst = std::max(worst, hor_w(b, {t, 0.0}).norm());
  }
  res.value = worst;
  res.pass = worst <= 1e-10;
  std::ostringstream os;
  os << "max |Hor W| over both constant-curvature backends: " << worst;
  res.detail = os.str();
  return res;
}

CheckResult check_ellipticity_sandwich(unsigned seed, int) {
  Rng rng(seed + 301);
  CheckResult res{"ellipticity_sandwich", true, 0.0, ""};
  double worst_slack = std::numeric_limits<double>::infinity();
  double worst_identity = 0.0;
  for (int it = 0; it < 10000; ++it) {
    const int d = rng.integer(2, 3);
    const PointKernel q = random_kernel(rng, d);
    const Vec du = random_covector(rng, d, rng.uniform(0.0, 2.0));
    Vec x(d);
    for (int i = 0; i < d; ++i) x[i] = rng.normal();

    const double ddf = ddf_apply(q, du, x);
    const ProjectionNorms pn = projection_norms(q, du, x);
    const EllipticityBounds mu = ellipticity_bounds(q);

    const Vec op = q.w + q.dh + du, om = q.w - q.dh + du;
    const double k2 = q.k * q.k;
    const double sp = std::sqrt(1.0 + k2 * op.dot(q.g_inv * op));
    const double sm = std::sqrt(1.0 + k2 * om.dot(q.g_inv * om));
    const double identity = k2 * (pn.p_plus_sq / sp + pn.p_minus_sq / sm);
    worst_identity =
        std::max(worst_identity, std::abs(identity - ddf) / std::max(std::abs(ddf), 1e-300));

    const double gu = std::sqrt(1.0 + du.dot(q.g_inv * du));
    const double lo = mu.mu1 * pn.p_sq / gu;
    const double hi = mu.mu2 * pn.p_sq / gu;
    worst_slack = std::min(worst_slack, (ddf - lo) / std::max({std::abs(ddf), lo, 1e-300}));
    worst_slack = std::min(worst_slack, (hi - ddf) / std::max({std::abs(ddf), hi, 1e-300}));
  }
  res.value = worst_slack;
  res.pass = worst_slack >= -1e-12 && worst_identity <= 1e-12;
  std::ostringstream os;
  os << "min sandwich slack (relative): " << worst_slack
     << ", max projection-identity error: " << worst_identity;
  res.detail = os.str();
  return res;
}

CheckResult check_inequality_sampling(unsigned seed, int) {
  Rng rng(seed + 401);
  CheckResult res{"inequality_sampling", true, 0.0, ""};
  double worst = std::numeric_limits<double>::infinity();
  bool strict_ok = true;
  for (int it = 0; it < 100000; ++it) {
    const int d = rng.integer(2, 3);
    const Mat g = random_spd(rng, d);
    const Mat gi = g.inverse();
    const Vec a = random_covector(rng, d, rng.uniform(0.0, 3.0));
    const Vec b = random_covector(rng, d, rng.uniform(0.0, 3.0));
    const double na = std::sqrt(a.dot(gi * a)), nb = std::sqrt(b.dot(gi * b));
    const Vec apb = a + b, amb = a - b;
    const double c1 = na;
    const double c2 = std::sqrt(1.0 + na * na);
    const double c3 = std::sqrt(2.0) * std::sqrt(1.0 + na * na + nb * nb);
    const double c4 = std::sqrt(1.0 + apb.dot(gi * apb)) + std::sqrt(1.0 + amb.dot(gi * amb));
    const double c5 = 2.0 * std::sqrt(1.0 + na * na + nb * nb);
    const double c6 = 2.0 * (1.0 + na + nb);
    const double chain[6] = {c1, c2, c3, c4, c5, c6};
    for (int i = 0; i < 5; ++i)
      worst = std::min(worst,
                       (chain[i + 1] - chain[i]) / std::max({chain[i], chain[i + 1], 1e-300}));

    // Lipschitz constant 2k and strict convexity of the integrand
    PointKernel q;
    q.g = g;
    q.g_inv = gi;
    q.k = std::exp(rng.uniform(0.0, 1.2));
    q.w = random_covector(rng, d, 1.0);
    q.dh = random_covector(rng, d, 1.0);
    const Vec x = random_covector(rng, d, rng.uniform(0.0, 2.0));
    const Vec y = random_covector(rng, d, rng.uniform(0.0, 2.0));
    const double fx = f_value(q, x), fy = f_value(q, y);
    const Vec xmy = x - y;
    const double dist = std::sqrt(xmy.dot(gi * xmy));
    worst = std::min(worst, (2.0 * q.k * dist - std::abs(fx - fy)) /
                                std::max({2.0 * q.k * dist, std::abs(fx - fy), 1e-300}));
    const double t = rng.uniform(0.2, 0.8);
    const double fmix = f_value(q, (t * x + (1.0 - t) * y).eval());
    const double gap = t * fx + (1.0 - t) * fy - fmix;
    worst = std::min(worst, gap / std::max({std::abs(fmix), 1.0}));
    if (dist >= 0.1 && gap <= 0.0) strict_ok = false;
  }
  res.value = worst;
  res.pass = worst >= -1e-12 && strict_ok;
  std::ostringstream os;
  os << "min relative slack over chain/Lipschitz/convexity samples: " << worst
     << (strict_ok ? "" : " (strict convexity violated)");
  res.detail = os.str();
  return res;
}

CheckResult check_variation_consistency(unsigned seed, int) {
  CheckResult res{"variation_consistency", true, 0.0, ""};
  double worst = 0.0;
  const double step = 1e-5;
  for (int i = 0; i < 20; ++i) {
    Rng rng(seed + 500 + i);
    Region r;
    if (i % 4 == 3) {
      r.dim = 3;
      r.lo = {0, 0, 0};
      r.hi = {1, 1, 1};
      r.cells = {5, 5, 5};
    } else {
      r = square_region(8);
    }
    const ScalarField wx = random_smooth_field(rng, r, 0.0, 0.4);
    const ScalarField wy = random_smooth_field(rng, r, 0.0, 0.4);
    const ScalarField wz = random_smooth_field(rng, r, 0.0, 0.4);
    CovectorField w = [&, dim = r.dim](const Vec& x) {
      Vec v(dim);
      v[0] = wx(x);
      v[1] = wy(x);
      if (dim == 3) v[2] = wz(x);
      return v;
    };
    const Chart chart = build_synthetic_chart(r, random_smooth_field(rng, r, 0.25, 0.03), w,
                                              "random-variation-check");
    NodalFunction h = sample_nodal(chart.grid, random_smooth_field(rng, r, 0.25, 0.03));
    NodalFunction u = sample_nodal(chart.grid, random_smooth_field(rng, r, 0.0, 0.3));
    NodalFunction delta = NodalFunction::zero(chart.grid.n_nodes());
    for (int n = 0; n < chart.grid.n_nodes(); ++n) delta.values[n] = rng.normal();
    const double eps = (i % 2 == 0) ? 0.0 : rng.uniform(0.05, 0.5);

    DomainSpec spec(chart, h, u);
    const Eigen::VectorXd grad = first_variation(spec, eps);
    auto shifted = [&](double a) {
      NodalFunction us = u;
      us.values += a * delta.values;
      return DomainSpec(chart, h, us);
    };
    const double fd1 =
        (area_eps(shifted(step), eps) - area_eps(shifted(-step), eps)) / (2.0 * step);
    const double assembled = grad.dot(delta.values);
    worst = std::max(worst, std::abs(assembled - fd1) /
                                std::max({std::abs(fd1), std::abs(assembled), 1e-30}));

    const Eigen::VectorXd hv = second_variation_apply(spec, eps, delta);
    const Eigen::VectorXd fdv =
        (first_variation(shifted(step), eps) - first_variation(shifted(-step), eps)) /
        (2.0 * step);
    worst = std::max(worst, (hv - fdv).norm() / std::max(fdv.norm(), 1e-30));
  }
  res.value = worst;
  res.pass = worst <= 1e-6;
  std::ostringstream os;
  os << "max relative mismatch of assembled variations vs central differences: " << worst;
  res.detail = os.str();
  return res;
}

CheckResult check_steiner_null(unsigned seed, int) {
  CheckResult res{"steiner_null", true, 0.0, ""};
  double worst_u = 0.0, worst_grad = 0.0;
  int instance = 0;
  for (int which = 0; which < 2; ++which) {
    Rng rng(seed + 600 + which);
    ScalarField h = [](const Vec& x) {
      return 0.3 + 0.1 * std::sin(2.0 * kPi * x[0]) * std::cos(kPi * x[1]);
    };
    const Chart chart = which == 0 ? euclidean_chart(64, h) : hyperbolic_chart(64, h);
    NodalFunction h_nodal = sample_nodal(chart.grid, h);
    NodalFunction u_init =
        sample_nodal(chart.grid, random_smooth_field(rng, chart.grid.region, 0.0, 0.1));
    const SolveReport report = continuation_solve(chart, h_nodal, {}, &u_init);
    worst_u = std::max(worst_u, report.u0.values.lpNorm<Eigen::Infinity>());
    for (const auto& st : report.stages) worst_grad = std::max(worst_grad, st.sup_grad_global);
    ++instance;
  }
  res.value = worst_u;
  res.pass = worst_u <= 1e-8 && worst_grad <= 1e-7;
  std::ostringstream os;
  os << "max sup|u0| = " << worst_u << ", max sup|grad u_eps| over the schedule = " << worst_grad
     << " on " << instance << " flat-connection charts";
  res.detail = os.str();
  return res;
}

double manufactured_error(int n) {
  ScalarField h = [](const Vec&) { return 0.25; };
  const Chart chart = manufactured_chart(n, h);
  NodalFunction h_nodal = sample_nodal(chart.grid, h);
  const SolveReport report = continuation_solve(chart, h_nodal);
  NodalFunction target = NodalFunction::zero(chart.grid.n_nodes());
  for (int i = 0; i < chart.grid.n_nodes(); ++i)
    target.values[i] = -manufactured_v(chart.grid.node(i));
  project_mean_zero(chart.grid, chart.fields, target);
  return (report.u0.values - target.values).lpNorm<Eigen::Infinity>();
}

CheckResult check_manufactured(unsigned, int) {
  CheckResult res{"manufactured_convergence", true, 0.0, ""};
  const double err64 = manufactured_error(64);
  const double err128 = manufactured_error(128);
  const double ratio = err64 / err128;
  res.value = err128;
  res.pass = err128 <= 5e-3 && ratio >= 2.5;
  std::ostringstream os;
  os << "sup error vs continuum minimizer: " << err64 << " (64^2) -> " << err128
     << " (128^2), ratio " << ratio;
  res.detail = os.str();
  return res;
}

CheckResult check_volume_area(unsigned seed, int) {
  Rng rng(seed + 800);
  CheckResult res{"volume_area_monotonicity", true, 0.0, ""};
  ScalarField h = [](const Vec& x) {
    return 0.2 + 0.05 * std::sin(2.0 * kPi * x[0]) * std::sin(2.0 * kPi * x[1]);
  };
  const Chart chart = manufactured_chart(48, h);
  NodalFunction h_nodal = sample_nodal(chart.grid, h);

  const SymmetrizedDomain sym =
      symmetrize(chart, h_nodal, NodalFunction::zero(chart.grid.n_nodes()));
  const double a0 = sym.area_value;

  const double vol_a = domain_volume(chart, h_nodal);
  const double vol_b = domain_volume(chart, h_nodal);
  const bool vol_bitwise = std::memcmp(&vol_a, &vol_b, sizeof(double)) == 0 &&
                           std::memcmp(&vol_a, &sym.volume, sizeof(double)) == 0;

  double min_margin = std::numeric_limits<double>::infinity();
  bool monotone = true, strict_ok = true;
  for (int i = 0; i < 20; ++i) {
    NodalFunction u_init =
        sample_nodal(chart.grid, random_smooth_field(rng, chart.grid.region, 0.0, 0.25));
    DomainSpec spec(chart, h_nodal, u_init);
    const double ai = area(spec);
    const double residual = first_variation(spec, 0.0).norm();
    const double margin = ai - a0;
    min_margin = std::min(min_margin, margin);
    if (margin < -1e-12 * std::max(1.0, ai)) monotone = false;
    if (residual > 1e-6 && margin <= 0.0) strict_ok = false;
  }
  res.value = min_margin;
  res.pass = vol_bitwise && monotone && strict_ok;
  std::ostringstream os;
  os << "min area margin A(u_init) - A(u0) over 20 random starts: " << min_margin
     << ", volume bitwise stable: " << (vol_bitwise ? "yes" : "no");
  res.detail = os.str();
  return res;
}

CheckResult check_uniqueness(unsigned seed, int) {
  CheckResult res{"uniqueness", true, 0.0, ""};
  ScalarField h = [](const Vec&) { return 0.25; };
  const Chart chart = manufactured_chart(64, h);
  NodalFunction h_nodal = sample_nodal(chart.grid, h);
  Eigen::VectorXd solutions[2];
  for (int run = 0; run < 2; ++run) {
    Rng rng(seed + 900 + 7 * run);
    NodalFunction u_init =
        sample_nodal(chart.grid, random_smooth_field(rng, chart.grid.region, 0.0, 0.2));
    const SolveReport report = continuation_solve(chart, h_nodal, {}, &u_init);
    solutions[run] = report.u0.values;
  }
  const double diff = (solutions[0] - solutions[1]).lpNorm<Eigen::Infinity>();
  res.value = diff;
  res.pass = diff <= 1e-7;
  std::ostringstream os;
  os << "sup distance between minimizers from independent warm starts: " << diff;
  res.detail = os.str();
  return res;
}

ScalarField ch2_diag_h() {
  return [](const Vec& x) {
    return 0.15 + 0.06 * std::cos(x[1]) * std::sin(kPi * (x[0] - 0.6) / 0.8);
  };
}

CheckResult check_level_set(unsigned, int) {
  CheckResult res{"level_set_diagnostic", true, 0.0, ""};
  const Chart chart = ch2_cone_annulus(48, 16, ch2_diag_h());
  NodalFunction h_nodal = sample_nodal(chart.grid, ch2_diag_h());
  const SolveReport report = continuation_solve(chart, h_nodal);
  const double eps = report.stages.back().eps;

  Vec center(2);
  center << 1.0, kPi;
  const int center_node = nearest_node(chart.grid, center);
  const auto dist = node_distances(chart, center_node);
  double rho_max = 0.0;
  for (double d : dist) rho_max = std::max(rho_max, d);

  // probe q_max first with an empty diagnostic call
  LevelSetDiagnostics probe = beta_diagnostic(chart, report.u0, eps, center_node, {0.0}, {rho_max});
  std::vector<double> lambdas, rhos;
  for (int i = 0; i < 8; ++i) lambdas.push_back(probe.q_max * 1.05 * i / 7.0);
  for (int i = 1; i <= 6; ++i) rhos.push_back(rho_max * i / 6.0);
  const LevelSetDiagnostics diag =
      beta_diagnostic(chart, report.u0, eps, center_node, lambdas, rhos);

  bool ok = probe.q_max > 0.0;
  double worst_violation = 0.0;
  // level-set Chebyshev bound for every pair lambda < Lambda, every radius
  for (std::size_t li = 0; li < lambdas.size(); ++li)
    for (std::size_t lj = li + 1; lj < lambdas.size(); ++lj)
      for (std::size_t ri = 0; ri < rhos.size(); ++ri) {
        const double gap = lambdas[lj] - lambdas[li];
        const double bound = diag.beta(li, ri) / (gap * gap);
        const double violation = diag.hausdorff(lj, ri) - bound;
        worst_violation = std::max(
            worst_violation, violation / std::max({bound, diag.hausdorff(lj, ri), 1e-300}));
      }
  if (worst_violation > 1e-12) ok = false;
  // monotone in lambda (nonincreasing) and rho (nondecreasing)
  for (std::size_t li = 0; li + 1 < lambdas.size(); ++li)
    for (std::size_t ri = 0; ri < rhos.size(); ++ri)
      if (diag.beta(li + 1, ri) > diag.beta(li, ri) * (1.0 + 1e-15) ||
          diag.hausdorff(li + 1, ri) > diag.hausdorff(li, ri) * (1.0 + 1e-15))
        ok = false;
  for (std::size_t li = 0; li < lambdas.size(); ++li)
    for (std::size_t ri = 0; ri + 1 < rhos.size(); ++ri)
      if (diag.beta(li, ri) > diag.beta(li, ri + 1) * (1.0 + 1e-15) ||
          diag.hausdorff(li, ri) > diag.hausdorff(li, ri + 1) * (1.0 + 1e-15))
        ok = false;
  // the top lambda row exceeds sup q, so it must vanish
  for (std::size_t ri = 0; ri < rhos.size(); ++ri)
    if (diag.beta(lambdas.size() - 1, ri) != 0.0) ok = false;

  res.value = worst_violation;
  res.pass = ok;
  std::ostringstream os;
  os << "worst relative violation of the level-set bound: " << worst_violation
     << ", q_max = " << probe.q_max;
  res.detail = os.str();
  return res;
}

CheckResult check_helix(unsigned, int threads) {
  CheckResult res{"helix", true, 0.0, ""};
  std::ostringstream os;
  bool ok = true;
  double min_margin = std::numeric_limits<double>::infinity();

  ScalarField h_const = [](const Vec&) { return 0.05; };  // 0.05 * chart extent

  // prescribed holonomy 0.5: winding against it must win for every period
  {
    const Chart chart = holonomy_annulus(24, 0.5, h_const);
    NodalFunction h_nodal = sample_nodal(chart.grid, h_const);
    const auto loop = seam_loop(chart.grid, {0.5});
    for (double period : {0.05, 0.1, 0.2}) {
      HelixSpec spec;
      spec.chart = &chart;
      spec.core_loop = loop;
      spec.period = period;
      spec.h = h_nodal;
      const HelixResult hr = build_helix(spec, {}, threads);
      const double a0 =
          std::find_if(hr.table.begin(), hr.table.end(),
                       [](const WindingResult& w) { return w.winding == 0; })
              ->area_value;
      const double margin = a0 - hr.best_area;
      min_margin = std::min(min_margin, margin);
      if (std::abs(hr.holonomy - 0.5) > 1e-10) ok = false;
      if (hr.best_winding == 0 || hr.best_winding * hr.holonomy >= 0.0) ok = false;
      if (margin <= 0.0) ok = false;
      os << "synthetic period " << period << ": m* = " << hr.best_winding
         << ", area drop " << margin << "; ";
    }
  }

  // exact-form control: zero holonomy, the unwound branch wins
  {
    const Chart chart = exact_form_annulus(24, h_const);
    NodalFunction h_nodal = sample_nodal(chart.grid, h_const);
    HelixSpec spec;
    spec.chart = &chart;
    spec.core_loop = seam_loop(chart.grid, {0.5});
    spec.period = 0.1;
    spec.h = h_nodal;
    spec.expect_holonomy = false;
    const HelixResult hr = build_helix(spec, {}, threads);
    if (std::abs(hr.holonomy) > 1e-10) ok = false;
    if (hr.best_winding != 0) ok = false;
    os << "exact-form control: m* = " << hr.best_winding << ", holonomy " << hr.holonomy << "; ";
  }

  // complex hyperbolic cone annulus: measured holonomy and a winding gain
  {
    ScalarField h_small = [](const Vec&) { return 0.04; };  // 0.05 * radial extent
    const Chart chart = ch2_cone_annulus(48, 16, h_small);
    NodalFunction h_nodal = sample_nodal(chart.grid, h_small);
    HelixSpec spec;
    spec.chart = &chart;
    spec.core_loop = seam_loop(chart.grid, {1.0});
    spec.period = 0.6;
    spec.h = h_nodal;
    const HelixResult hr = build_helix(spec, {}, threads);
    const double a0 = std::find_if(hr.table.begin(), hr.table.end(),
                                   [](const WindingResult& w) { return w.winding == 0; })
                          ->area_value;
    const double margin = a0 - hr.best_area;
    min_margin = std::min(min_margin, margin);
    if (std::abs(hr.holonomy) < 0.1) ok = false;
    if (hr.best_winding == 0 || margin <= 0.0) ok = false;
    os << "ch2 cone: holonomy " << hr.holonomy << ", m* = " << hr.best_winding
       << ", area drop " << margin;
  }

  res.value = min_margin;
  res.pass = ok;
  res.detail = os.str();
  return res;
}

CheckResult check_gradient_bound(unsigned, int) {
  CheckResult res{"gradient_bound_regression", true, 0.0, ""};
  double worst = 0.0;
  std::ostringstream os;
  auto tail_variation = [&](const SolveReport& report, const char* label) {
    const std::size_t n = report.stages.size();
    const double a = report.stages[n - 2].sup_grad_interior;
    const double b = report.stages[n - 1].sup_grad_interior;
    const double big = std::max(a, b);
    const double var = big < 1e-7 ? 0.0 : std::abs(a - b) / big;
    worst = std::max(worst, var);
    os << label << ": " << var << "; ";
  };

  {
    ScalarField h = [](const Vec&) { return 0.25; };
    const Chart chart = manufactured_chart(64, h);
    tail_variation(continuation_solve(chart, sample_nodal(chart.grid, h)), "manufactured");
  }
  {
    const Chart chart = ch2_cone_annulus(48, 16, ch2_diag_h());
    tail_variation(continuation_solve(chart, sample_nodal(chart.grid, ch2_diag_h())), "ch2_cone");
  }
  {
    ScalarField h = [](const Vec&) { return 0.1; };
    const Chart chart = holonomy_annulus(24, 0.5, h);
    NodalFunction u_init = NodalFunction::zero(chart.grid.n_nodes());
    u_init.winding = -2;
    u_init.period = 0.2;
    tail_variation(continuation_solve(chart, sample_nodal(chart.grid, h), {}, &u_init),
                   "wound_annulus");
  }

  res.value = worst;
  res.pass = worst < 0.05;
  res.detail = "interior sup-gradient variation over the last two eps stages: " + os.str();
  return res;
}

struct CheckEntry {
  std::string name;
  double budget_seconds;
  std::function<CheckResult(unsigned, int)> run;
};

const std::vector<CheckEntry>& registry() {
  static const std::vector<CheckEntry> entries = {
      {"geometry_oracle", 5.0, check_geometry_oracle},
      {"constant_curvature_w", 30.0, check_constant_curvature_w},
      {"ellipticity_sandwich", 1.0, check_ellipticity_sandwich},
      {"inequality_sampling", 5.0, check_inequality_sampling},
      {"variation_consistency", 10.0, check_variation_consistency},
      {"steiner_null", 30.0, check_steiner_null},
      {"manufactured_convergence", 120.0, check_manufactured},
      {"volume_area_monotonicity", 60.0, check_volume_area},
      {"uniqueness", 60.0, check_uniqueness},
      {"level_set_diagnostic", 30.0, check_level_set},
      {"helix", 300.0, check_helix},
      {"gradient_bound_regression", 600.0, check_gradient_bound},
  };
  return entries;
}

}  // namespace

std::vector<std::string> verification_check_names() {
  std::vector<std::string> names;
  for (const auto& e : registry()) names.push_back(e.name);
  return names;
}

CheckResult run_verification_check(const std::string& name, unsigned seed, int threads) {
  for (const auto& e : registry()) {
    if (e.name != name) continue;
    const auto start = std::chrono::steady_clock::now();
    CheckResult r = e.run(seed, threads);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > e.budget_seconds) {
      r.pass = false;
      r.detail += " [exceeded time budget of " + std::to_string(e.budget_seconds) + "s]";
    }
    return r;
  }
  throw InvalidArgument("unknown verification check: " + name);
}

std::vector<CheckResult> run_all_verification_checks(unsigned seed, int threads) {
  std::vector<CheckResult> out;
  for (const auto& e : registry()) out.push_back(run_verification_check(e.name, seed, threads));
  return out;
}

}  // namespace orbitsym
