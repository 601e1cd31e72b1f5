// Command line front end: build charts, run solves, winding experiments,
// diagnostics and the verification suite.  Every run writes report.json into
// the output directory; wall-clock metadata goes to run_meta.json so that
// identical configurations produce byte-identical reports.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "orbitsym/io.hpp"
#include "orbitsym/symmetrize.hpp"
#include "orbitsym/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace orbitsym;

namespace {

constexpr double kPi = 3.14159265358979323846;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNonconvergence = 3;

struct CommonOpts {
  std::string out = "out";
  unsigned seed = 0;
  int threads = 1;
};

struct ChartOpts {
  std::string backend = "euclidean";
  int ambient_dim = 3;
  std::string model;  // empty: pick the backend's default
  std::vector<double> lo{0.0, 0.0};
  std::vector<double> hi{1.0, 1.0};
  std::vector<int> cells{64, 64};
  int periodic_axis = -1;
  double theta0 = kPi / 4.0;
  std::string h_profile = "constant";  // constant | sine
  double h_value = 0.25;
  double h_amp = 0.0;
  std::string h_file;   // tabulated nodal values, one per line
  std::string w_mode = "backend";  // backend | exact_gradient | uniform_holonomy
  double v_amp = 0.1;
  double holonomy = 0.5;
  std::string chart_in;   // load a saved chart instead of building one
  std::string chart_out;  // save the chart used for the run
};

struct SolverOpts {
  double eps_start = 1.0;
  double eps_factor = 0.25;
  double eps_min = 1e-5;
  double newton_tol = 1e-10;
  int max_newton = 60;
  double continuation_tol = 1e-6;

  SolveConfig config() const {
    SolveConfig c;
    c.eps_start = eps_start;
    c.eps_factor = eps_factor;
    c.eps_min = eps_min;
    c.newton_tol_rel = newton_tol;
    c.max_newton_iter = max_newton;
    c.continuation_tol = continuation_tol;
    return c;
  }
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads for independent solves")
      ->capture_default_str();
}

void add_chart(CLI::App* cmd, ChartOpts& o) {
  cmd->add_option("--backend", o.backend,
                  "euclidean | real_hyperbolic | complex_hyperbolic2 | synthetic")
      ->capture_default_str();
  cmd->add_option("--dim", o.ambient_dim, "Ambient dimension (euclidean/real_hyperbolic)")
      ->capture_default_str();
  cmd->add_option("--model", o.model,
                  "cartesian | hyperbolic_polar | ch2_meridian | ch2_cone | ch2_full");
  cmd->add_option("--lo", o.lo, "Lower chart coordinates")->delimiter(',')->capture_default_str();
  cmd->add_option("--hi", o.hi, "Upper chart coordinates")->delimiter(',')->capture_default_str();
  cmd->add_option("--cells", o.cells, "Cells per axis (>= 4)")->delimiter(',')->capture_default_str();
  cmd->add_option("--periodic-axis", o.periodic_axis, "Seam axis, -1 for none")
      ->capture_default_str();
  cmd->add_option("--theta0", o.theta0, "Cone slice angle for ch2_cone")->capture_default_str();
  cmd->add_option("--h-profile", o.h_profile, "constant | sine")->capture_default_str();
  cmd->add_option("--h-value", o.h_value, "Base half-thickness")->capture_default_str();
  cmd->add_option("--h-amp", o.h_amp, "Half-thickness modulation amplitude")
      ->capture_default_str();
  cmd->add_option("--h-file", o.h_file, "Tabulated nodal half-thickness, one value per line");
  cmd->add_option("--w-mode", o.w_mode,
                  "backend | exact_gradient | uniform_holonomy (synthetic connections)")
      ->capture_default_str();
  cmd->add_option("--v-amp", o.v_amp, "Amplitude of the exact-gradient potential")
      ->capture_default_str();
  cmd->add_option("--holonomy", o.holonomy, "Loop integral for uniform_holonomy")
      ->capture_default_str();
  cmd->add_option("--chart-in", o.chart_in, "Load a chart JSON file instead of building");
  cmd->add_option("--chart-out", o.chart_out, "Save the chart as JSON");
}

void add_solver(CLI::App* cmd, SolverOpts& o) {
  cmd->add_option("--eps-start", o.eps_start)->capture_default_str();
  cmd->add_option("--eps-factor", o.eps_factor)->capture_default_str();
  cmd->add_option("--eps-min", o.eps_min)->capture_default_str();
  cmd->add_option("--newton-tol", o.newton_tol, "Residual tolerance relative to the stage start")
      ->capture_default_str();
  cmd->add_option("--max-newton", o.max_newton)->capture_default_str();
  cmd->add_option("--continuation-tol", o.continuation_tol)->capture_default_str();
}

Region make_region(const ChartOpts& o) {
  Region r;
  r.dim = static_cast<int>(o.cells.size());
  require(o.lo.size() == o.hi.size() && o.lo.size() == o.cells.size(),
          "--lo, --hi and --cells need matching lengths");
  for (std::size_t a = 0; a < o.cells.size(); ++a) {
    r.lo[a] = o.lo[a];
    r.hi[a] = o.hi[a];
    r.cells[a] = o.cells[a];
  }
  r.periodic_axis = o.periodic_axis;
  return r;
}

ScalarField make_h_field(const ChartOpts& o, const Region& r) {
  if (o.h_profile == "constant") {
    const double v = o.h_value;
    return [v](const Vec&) { return v; };
  }
  if (o.h_profile == "sine") {
    const double base = o.h_value, amp = o.h_amp;
    return [base, amp, r](const Vec& x) {
      double prod = amp;
      for (int a = 0; a < r.dim; ++a) {
        const double xi = (x[a] - r.lo[a]) / (r.hi[a] - r.lo[a]);
        prod *= (a == 0) ? std::sin(2.0 * kPi * xi) : std::cos(kPi * xi);
      }
      return base + prod;
    };
  }
  throw InvalidArgument("unknown h profile '" + o.h_profile + "' (constant | sine)");
}

ChartModel parse_model(const ChartOpts& o) {
  std::string m = o.model;
  if (m.empty()) {
    if (o.backend == "euclidean") m = "cartesian";
    else if (o.backend == "real_hyperbolic") m = "hyperbolic_polar";
    else if (o.backend == "complex_hyperbolic2") m = "ch2_cone";
  }
  if (m == "cartesian") return ChartModel::Cartesian;
  if (m == "hyperbolic_polar") return ChartModel::HyperbolicPolar;
  if (m == "ch2_meridian") return ChartModel::CH2Meridian;
  if (m == "ch2_cone") return ChartModel::CH2Cone;
  if (m == "ch2_full") return ChartModel::CH2Full;
  throw InvalidArgument("unknown chart model '" + m + "'");
}

SpaceBackend parse_backend(const ChartOpts& o) {
  if (o.backend == "euclidean") return SpaceBackend::euclidean(o.ambient_dim);
  if (o.backend == "real_hyperbolic") return SpaceBackend::real_hyperbolic(o.ambient_dim);
  if (o.backend == "complex_hyperbolic2") return SpaceBackend::complex_hyperbolic2();
  throw InvalidArgument("unknown backend '" + o.backend + "'");
}

Chart make_chart(const ChartOpts& o) {
  if (!o.chart_in.empty()) return load_chart(o.chart_in);
  const Region r = make_region(o);
  const ScalarField h = make_h_field(o, r);
  Chart chart;
  if (o.backend == "synthetic" || o.w_mode != "backend") {
    require(r.dim == 2, "synthetic connections are 2-dimensional");
    CovectorField w;
    if (o.w_mode == "exact_gradient") {
      const double amp = o.v_amp;
      w = [amp, r](const Vec& x) {
        const double x0 = (x[0] - r.lo[0]) / (r.hi[0] - r.lo[0]);
        const double x1 = (x[1] - r.lo[1]) / (r.hi[1] - r.lo[1]);
        Vec v(2);
        v[0] = amp * kPi * std::cos(kPi * x0) * std::sin(kPi * x1) / (r.hi[0] - r.lo[0]);
        v[1] = amp * kPi * std::sin(kPi * x0) * std::cos(kPi * x1) / (r.hi[1] - r.lo[1]);
        return v;
      };
    } else if (o.w_mode == "uniform_holonomy") {
      require(r.periodic_axis >= 0, "uniform_holonomy needs --periodic-axis");
      const double span = r.hi[r.periodic_axis] - r.lo[r.periodic_axis];
      const double component = o.holonomy / span;
      const int axis = r.periodic_axis;
      w = [component, axis](const Vec&) {
        Vec v = Vec::Zero(2);
        v[axis] = component;
        return v;
      };
    } else {
      throw InvalidArgument("synthetic charts need --w-mode exact_gradient or uniform_holonomy");
    }
    chart = build_synthetic_chart(r, h, w, o.w_mode);
  } else {
    chart = build_chart(parse_backend(o), parse_model(o), r, h, o.theta0);
  }
  if (!o.chart_out.empty()) save_chart(chart, o.chart_out);
  return chart;
}

NodalFunction make_h_nodal(const Chart& chart, const ChartOpts& o) {
  NodalFunction h = NodalFunction::zero(chart.grid.n_nodes());
  if (!o.h_file.empty()) {
    std::ifstream is(o.h_file);
    require(is.good(), "cannot open h table: " + o.h_file);
    for (int i = 0; i < chart.grid.n_nodes(); ++i)
      require(static_cast<bool>(is >> h.values[i]),
              "h table ended early: need one value per node");
    return h;
  }
  for (int i = 0; i < chart.grid.n_nodes(); ++i) h.values[i] = chart.fields.h_node[i];
  return h;
}

NodalFunction random_initial(const Chart& chart, unsigned seed, double amp) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  const double p0 = phase(gen), p1 = phase(gen);
  const Region& r = chart.grid.region;
  NodalFunction u = NodalFunction::zero(chart.grid.n_nodes());
  for (int i = 0; i < chart.grid.n_nodes(); ++i) {
    const Vec x = chart.grid.node(i);
    double v = 1.0;
    for (int a = 0; a < r.dim; ++a) {
      const double xi = (x[a] - r.lo[a]) / (r.hi[a] - r.lo[a]);
      v *= std::sin(2.0 * kPi * xi + (a == 0 ? p0 : p1));
    }
    u.values[i] = amp * v;
  }
  return u;
}

json stages_json(const SolveReport& report) {
  json stages = json::array();
  for (const auto& st : report.stages) {
    stages.push_back({{"eps", st.eps},
                      {"iterations", st.iterations},
                      {"initial_residual", st.initial_residual},
                      {"final_residual", st.final_residual},
                      {"area", st.area_value},
                      {"area_eps", st.area_eps_value},
                      {"sup_grad_interior", st.sup_grad_interior},
                      {"sup_grad_global", st.sup_grad_global},
                      {"grad_energy", st.grad_energy},
                      {"mean_defect", st.mean_defect}});
  }
  return stages;
}

json chart_json(const Chart& chart) {
  return {{"model", chart.meta.model},
          {"backend", chart.meta.backend},
          {"nodes", chart.grid.n_nodes()},
          {"simplices", chart.grid.n_simplices()},
          {"dim", chart.grid.dim},
          {"seam", chart.grid.seam.has_value()}};
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream os(path);
  require(os.good(), "cannot write " + path.string());
  os << doc.dump(1, '\t') << "\n";
}

void write_report(const fs::path& out_dir, const json& report) {
  write_json(out_dir / "report.json", report);
}

void write_meta(const fs::path& out_dir, double elapsed_seconds) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[64];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  write_json(out_dir / "run_meta.json",
             {{"timestamp", buf}, {"elapsed_seconds", elapsed_seconds}});
}

// ---- subcommands ----------------------------------------------------------

int run_fields(const CommonOpts& common, const ChartOpts& chart_opts) {
  const fs::path out(common.out);
  fs::create_directories(out);
  require(chart_opts.cells.size() == 2, "fields dumps a 2d (t, theta) grid");
  const SpaceBackend backend = parse_backend(chart_opts);
  const Region r = make_region(chart_opts);

  const bool ch2 = backend.kind == SpaceKind::ComplexHyperbolic2;
  std::vector<std::string> header{"t", "theta", "k", "w_norm", "g_tt", "g_tth", "g_thth"};
  if (ch2) {
    header.push_back("g_phph");
    header.push_back("w_phi");
  }
  CsvWriter csv(out / "fields.csv", header);
  int rows = 0;
  for (int i = 0; i <= r.cells[0]; ++i)
    for (int j = 0; j <= r.cells[1]; ++j) {
      const double t = r.lo[0] + (r.hi[0] - r.lo[0]) * i / r.cells[0];
      const double theta = r.lo[1] + (r.hi[1] - r.lo[1]) * j / r.cells[1];
      const RadialCoord p{t, theta};
      const double k = killing_norm(backend, p);
      const double wn = std::sqrt(w_norm_sq(backend, p));
      double g_tt = 1.0, g_tth = 0.0, g_thth = 1.0;
      if (backend.kind != SpaceKind::Euclidean)
        g_thth = std::sinh(t) * std::sinh(t);
      std::vector<double> row{t, theta, k, wn, g_tt, g_tth, g_thth};
      if (ch2) {
        const double st = std::sin(theta);
        const double g_bb = t > 0.0 ? orbit_metric(backend, p)(2, 2)
                                    : 0.0;  // azimuthal direction collapses on the axis
        row.push_back(st * st * g_bb);
        row.push_back(-st * section_w(backend, p)[2]);
      }
      csv.row(row);
      ++rows;
    }
  write_report(out, {{"command", "fields"},
                     {"backend", chart_opts.backend},
                     {"rows", rows},
                     {"files", {"fields.csv"}}});
  return kExitOk;
}

int run_solve(const CommonOpts& common, const ChartOpts& chart_opts, const SolverOpts& solver_opts,
              const std::string& u0_mode, double u0_amp) {
  const fs::path out(common.out);
  fs::create_directories(out);
  const Chart chart = make_chart(chart_opts);
  const NodalFunction h = make_h_nodal(chart, chart_opts);
  NodalFunction u_init = NodalFunction::zero(chart.grid.n_nodes());
  if (u0_mode == "random") u_init = random_initial(chart, common.seed, u0_amp);
  else require(u0_mode == "zero", "unknown --u0-mode '" + u0_mode + "' (zero | random)");

  json report{{"command", "solve"}, {"chart", chart_json(chart)}, {"seed", common.seed}};
  try {
    const SymmetrizedDomain sym = symmetrize(chart, h, u_init, solver_opts.config());
    CsvWriter sheets(out / "sheets.csv", {"node", "u_minus_h", "u_plus_h"});
    for (int i = 0; i < chart.grid.n_nodes(); ++i)
      sheets.row({static_cast<double>(i), sym.sheet_lower[i], sym.sheet_upper[i]});

    if (chart.meta.tag == "exact_gradient") {
      // the continuum minimizer is the negated potential; report the gap
      const Region& r = chart.grid.region;
      NodalFunction target = NodalFunction::zero(chart.grid.n_nodes());
      for (int i = 0; i < chart.grid.n_nodes(); ++i) {
        const Vec x = chart.grid.node(i);
        const double x0 = (x[0] - r.lo[0]) / (r.hi[0] - r.lo[0]);
        const double x1 = (x[1] - r.lo[1]) / (r.hi[1] - r.lo[1]);
        target.values[i] = -chart_opts.v_amp * std::sin(kPi * x0) * std::sin(kPi * x1);
      }
      project_mean_zero(chart.grid, chart.fields, target);
      report["manufactured_error"] =
          (sym.u0.values - target.values).lpNorm<Eigen::Infinity>();
    }
    report["volume"] = sym.volume;
    report["area_initial"] = sym.area_initial;
    report["area_final"] = sym.area_value;
    report["converged"] = sym.report.converged;
    report["degenerate_h"] = sym.report.degenerate_h;
    report["area_eps1_of_zero"] = sym.report.area_eps1_of_zero;
    report["stages"] = stages_json(sym.report);
    bool energy_ok = true;
    for (const auto& st : sym.report.stages)
      if (st.eps * st.grad_energy > sym.report.area_eps1_of_zero * (1.0 + 1e-12))
        energy_ok = false;
    report["energy_bound_ok"] = energy_ok;
    report["files"] = {"sheets.csv"};
    write_report(out, report);
    return sym.report.converged ? kExitOk : kExitNonconvergence;
  } catch (const NonconvergenceError& e) {
    report["error"] = e.what();
    write_report(out, report);
    return kExitNonconvergence;
  }
}

int run_helix(const CommonOpts& common, const ChartOpts& chart_opts,
              const SolverOpts& solver_opts, double period, int winding_min, int winding_max,
              bool expect_holonomy) {
  const fs::path out(common.out);
  fs::create_directories(out);
  const Chart chart = make_chart(chart_opts);
  require(chart.grid.seam.has_value(), "helix runs need a periodic chart (--periodic-axis)");

  HelixSpec spec;
  spec.chart = &chart;
  std::vector<double> mid;
  for (int a = 0; a < chart.grid.dim; ++a)
    if (a != chart.grid.seam->axis)
      mid.push_back(0.5 * (chart.grid.region.lo[a] + chart.grid.region.hi[a]));
  spec.core_loop = seam_loop(chart.grid, mid);
  spec.period = period;
  spec.winding_min = winding_min;
  spec.winding_max = winding_max;
  spec.h = make_h_nodal(chart, chart_opts);
  spec.expect_holonomy = expect_holonomy;

  json report{{"command", "helix"}, {"chart", chart_json(chart)}, {"period", period}};
  try {
    const HelixResult res = build_helix(spec, solver_opts.config(), common.threads);
    CsvWriter csv(out / "winding.csv", {"m", "area"});
    json table = json::array();
    double area0 = 0.0;
    for (const auto& w : res.table) {
      csv.row({static_cast<double>(w.winding), w.area_value});
      table.push_back(
          {{"m", w.winding}, {"area", w.area_value}, {"converged", w.converged}});
      if (w.winding == 0) area0 = w.area_value;
    }
    report["holonomy"] = res.holonomy;
    report["best_winding"] = res.best_winding;
    report["best_area"] = res.best_area;
    report["area_unwound"] = area0;
    report["area_drop"] = area0 - res.best_area;
    report["table"] = table;
    report["files"] = {"winding.csv"};
    write_report(out, report);
    return kExitOk;
  } catch (const NonconvergenceError& e) {
    report["error"] = e.what();
    write_report(out, report);
    return kExitNonconvergence;
  }
}

int run_diagnose(const CommonOpts& common, const ChartOpts& chart_opts,
                 const SolverOpts& solver_opts, int n_lambda, int n_rho) {
  const fs::path out(common.out);
  fs::create_directories(out);
  const Chart chart = make_chart(chart_opts);
  const NodalFunction h = make_h_nodal(chart, chart_opts);

  json report{{"command", "diagnose"}, {"chart", chart_json(chart)}};
  try {
    const SolveReport solve = continuation_solve(chart, h, solver_opts.config());
    const double eps = solve.stages.back().eps;

    // level-set tables around the chart center
    Vec center(chart.grid.dim);
    for (int a = 0; a < chart.grid.dim; ++a)
      center[a] = 0.5 * (chart.grid.region.lo[a] + chart.grid.region.hi[a]);
    int center_node = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < chart.grid.n_nodes(); ++i) {
      const double d = (chart.grid.node(i) - center).squaredNorm();
      if (d < best) {
        best = d;
        center_node = i;
      }
    }
    const auto dist = node_distances(chart, center_node);
    double rho_max = 0.0;
    for (double d : dist) rho_max = std::max(rho_max, d);
    const LevelSetDiagnostics probe =
        beta_diagnostic(chart, solve.u0, eps, center_node, {0.0}, {rho_max});
    std::vector<double> lambdas, rhos;
    for (int i = 0; i < n_lambda; ++i)
      lambdas.push_back(probe.q_max * 1.05 * i / std::max(1, n_lambda - 1));
    for (int i = 1; i <= n_rho; ++i) rhos.push_back(rho_max * i / n_rho);
    const LevelSetDiagnostics diag =
        beta_diagnostic(chart, solve.u0, eps, center_node, lambdas, rhos);

    CsvWriter beta_csv(out / "beta.csv", {"lambda", "rho", "beta", "hausdorff"});
    for (std::size_t li = 0; li < lambdas.size(); ++li)
      for (std::size_t ri = 0; ri < rhos.size(); ++ri)
        beta_csv.row({lambdas[li], rhos[ri], diag.beta(li, ri), diag.hausdorff(li, ri)});

    bool eq33_ok = true;
    for (std::size_t li = 0; li < lambdas.size(); ++li)
      for (std::size_t lj = li + 1; lj < lambdas.size(); ++lj)
        for (std::size_t ri = 0; ri < rhos.size(); ++ri) {
          const double gap = lambdas[lj] - lambdas[li];
          if (diag.hausdorff(lj, ri) >
              diag.beta(li, ri) / (gap * gap) + 1e-12 * (1.0 + diag.hausdorff(lj, ri)))
            eq33_ok = false;
        }

    // per-simplex ellipticity constants with a sampled sandwich column
    DomainSpec spec(chart, h, solve.u0);
    const auto bounds = ellipticity_bounds(spec);
    const auto du = discrete_gradient(chart.grid, solve.u0);
    std::mt19937_64 gen(common.seed);
    std::normal_distribution<double> nd;
    CsvWriter ell_csv(out / "ellipticity.csv",
                      {"simplex", "mu1", "mu2", "ddf_sample", "bound_lower", "bound_upper"});
    bool sandwich_ok = true;
    for (int s = 0; s < chart.grid.n_simplices(); ++s) {
      const PointKernel q = spec.kernel(s);
      Vec x(chart.grid.dim);
      for (int a = 0; a < chart.grid.dim; ++a) x[a] = nd(gen);
      const double ddf = ddf_apply(q, du[s], x);
      const ProjectionNorms pn = projection_norms(q, du[s], x);
      const double gu = std::sqrt(1.0 + du[s].dot(q.g_inv * du[s]));
      const double lo_b = bounds[s].mu1 * pn.p_sq / gu;
      const double hi_b = bounds[s].mu2 * pn.p_sq / gu;
      if (ddf < lo_b - 1e-12 * std::abs(ddf) || ddf > hi_b + 1e-12 * std::abs(hi_b))
        sandwich_ok = false;
      ell_csv.row({static_cast<double>(s), bounds[s].mu1, bounds[s].mu2, ddf, lo_b, hi_b});
    }

    report["converged"] = solve.converged;
    report["q_max"] = probe.q_max;
    report["center_node"] = center_node;
    report["eq33_ok"] = eq33_ok;
    report["sandwich_ok"] = sandwich_ok;
    if (chart.grid.seam) {
      std::vector<double> mid;
      for (int a = 0; a < chart.grid.dim; ++a)
        if (a != chart.grid.seam->axis)
          mid.push_back(0.5 * (chart.grid.region.lo[a] + chart.grid.region.hi[a]));
      report["holonomy"] =
          loop_holonomy(chart.grid, chart.fields, seam_loop(chart.grid, mid));
    }
    // per-simplex chart field dump
    CsvWriter fields_csv(out / "chart_fields.csv", {"simplex", "k", "w_norm", "h", "weight"});
    for (int s = 0; s < chart.grid.n_simplices(); ++s) {
      const double wn =
          std::sqrt(chart.fields.w[s].dot(chart.fields.g_inv[s] * chart.fields.w[s]));
      fields_csv.row({static_cast<double>(s), chart.fields.k[s], wn, chart.fields.h[s],
                      chart.fields.weight[s]});
    }

    report["stages"] = stages_json(solve);
    report["files"] = {"beta.csv", "ellipticity.csv", "chart_fields.csv"};
    write_report(out, report);
    return kExitOk;
  } catch (const NonconvergenceError& e) {
    report["error"] = e.what();
    write_report(out, report);
    return kExitNonconvergence;
  }
}

int run_verify(const CommonOpts& common, const std::vector<std::string>& only, bool list_only) {
  if (list_only) {
    for (const auto& name : verification_check_names()) std::printf("%s\n", name.c_str());
    return kExitOk;
  }
  const fs::path out(common.out);
  fs::create_directories(out);
  std::vector<std::string> names = only.empty() ? verification_check_names() : only;
  json results = json::array();
  bool all_pass = true;
  for (const auto& name : names) {
    const CheckResult r = run_verification_check(name, common.seed, common.threads);
    std::printf("%s  %-26s  value=%-12.5g  %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.value, r.detail.c_str());
    std::fflush(stdout);
    results.push_back(
        {{"name", r.name}, {"pass", r.pass}, {"value", r.value}, {"detail", r.detail}});
    all_pass = all_pass && r.pass;
  }
  write_report(out, {{"command", "verify"},
                     {"seed", common.seed},
                     {"results", results},
                     {"all_pass", all_pass}});
  return all_pass ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orbit symmetrization toolkit: convex area minimization over graphs along "
               "transvection orbits, with closed-form geometry backends"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML file (sections per subcommand)");

  CommonOpts common;
  ChartOpts chart_opts;
  SolverOpts solver_opts;
  std::string u0_mode = "zero";
  double u0_amp = 0.1;
  double period = 0.1;
  int winding_min = -2, winding_max = 2;
  bool expect_holonomy = true;
  int n_lambda = 8, n_rho = 6;
  std::vector<std::string> only;
  bool list_checks = false;

  CLI::App* fields = app.add_subcommand("fields", "Dump sampled geometry fields as CSV");
  fields->fallthrough();
  add_common(fields, common);
  add_chart(fields, chart_opts);

  CLI::App* solve = app.add_subcommand("solve", "Symmetrize a domain: minimize the area functional");
  solve->fallthrough();
  add_common(solve, common);
  add_chart(solve, chart_opts);
  add_solver(solve, solver_opts);
  solve->add_option("--u0-mode", u0_mode, "zero | random initial midsurface")
      ->capture_default_str();
  solve->add_option("--u0-amp", u0_amp, "Amplitude of the random initial midsurface")
      ->capture_default_str();

  CLI::App* helix = app.add_subcommand("helix", "Winding scan on a seam annulus");
  helix->fallthrough();
  add_common(helix, common);
  add_chart(helix, chart_opts);
  add_solver(helix, solver_opts);
  helix->add_option("--period", period, "Orbit-direction climb per winding")
      ->capture_default_str();
  helix->add_option("--winding-min", winding_min)->capture_default_str();
  helix->add_option("--winding-max", winding_max)->capture_default_str();
  helix->add_flag("--expect-holonomy,!--no-expect-holonomy", expect_holonomy,
                  "Require nonzero loop holonomy before scanning");

  CLI::App* diagnose = app.add_subcommand("diagnose", "Solve and dump level-set/ellipticity tables");
  diagnose->fallthrough();
  add_common(diagnose, common);
  add_chart(diagnose, chart_opts);
  add_solver(diagnose, solver_opts);
  diagnose->add_option("--n-lambda", n_lambda)->capture_default_str();
  diagnose->add_option("--n-rho", n_rho)->capture_default_str();

  CLI::App* verify = app.add_subcommand("verify", "Run the named verification checks");
  verify->fallthrough();
  add_common(verify, common);
  verify->add_option("--only", only, "Run only the named checks (repeatable)")->delimiter(',');
  verify->add_flag("--list", list_checks, "List check names and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return kExitValidation;
  }

  const auto start = std::chrono::steady_clock::now();
  int code = kExitOk;
  try {
    if (fields->parsed()) code = run_fields(common, chart_opts);
    else if (solve->parsed()) code = run_solve(common, chart_opts, solver_opts, u0_mode, u0_amp);
    else if (helix->parsed())
      code = run_helix(common, chart_opts, solver_opts, period, winding_min, winding_max,
                       expect_holonomy);
    else if (diagnose->parsed())
      code = run_diagnose(common, chart_opts, solver_opts, n_lambda, n_rho);
    else if (verify->parsed()) code = run_verify(common, only, list_checks);
  } catch (const NonconvergenceError& e) {
    std::fprintf(stderr, "solver did not converge: %s\n", e.what());
    try {
      fs::create_directories(common.out);
      write_json(fs::path(common.out) / "report.json", {{"error", e.what()}});
    } catch (...) {
    }
    code = kExitNonconvergence;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    try {
      fs::create_directories(common.out);
      write_json(fs::path(common.out) / "report.json", {{"error", e.what()}});
    } catch (...) {
    }
    code = kExitValidation;
  }
  try {
    if (!verify->parsed() || !list_checks) {
      fs::create_directories(common.out);
      write_meta(common.out,
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
  } catch (...) {
  }
  return code;
}
