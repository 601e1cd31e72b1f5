#include "orbitsym/io.hpp"

#include <charconv>
#include <fstream>

#include <json.hpp>

namespace orbitsym {

using nlohmann::json;

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // normalize negative zero
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

namespace {

json vec_array(const std::vector<Vec>& vs) {
  json out = json::array();
  for (const Vec& v : vs) {
    json row = json::array();
    for (int i = 0; i < v.size(); ++i) row.push_back(v[i]);
    out.push_back(row);
  }
  return out;
}

std::vector<Vec> vec_array_from(const json& j, int dim) {
  std::vector<Vec> out;
  out.reserve(j.size());
  for (const auto& row : j) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = row.at(i).get<double>();
    out.push_back(v);
  }
  return out;
}

json mat_array(const std::vector<Mat>& ms) {
  json out = json::array();
  for (const Mat& m : ms) {
    json flat = json::array();
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
    out.push_back(flat);
  }
  return out;
}

std::vector<Mat> mat_array_from(const json& j, int dim) {
  std::vector<Mat> out;
  out.reserve(j.size());
  for (const auto& flat : j) {
    Mat m(dim, dim);
    int idx = 0;
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) m(a, b) = flat.at(idx++).get<double>();
    out.push_back(m);
  }
  return out;
}

json region_json(const Region& r) {
  return json{{"dim", r.dim},
              {"lo", {r.lo[0], r.lo[1], r.lo[2]}},
              {"hi", {r.hi[0], r.hi[1], r.hi[2]}},
              {"cells", {r.cells[0], r.cells[1], r.cells[2]}},
              {"periodic_axis", r.periodic_axis}};
}

Region region_from(const json& j) {
  Region r;
  r.dim = j.at("dim").get<int>();
  for (int a = 0; a < 3; ++a) {
    r.lo[a] = j.at("lo").at(a).get<double>();
    r.hi[a] = j.at("hi").at(a).get<double>();
    r.cells[a] = j.at("cells").at(a).get<int>();
  }
  r.periodic_axis = j.at("periodic_axis").get<int>();
  return r;
}

}  // namespace

void save_chart(const Chart& chart, const std::filesystem::path& path) {
  const Grid& g = chart.grid;
  json doc;
  doc["format"] = "orbitsym-chart";
  doc["version"] = 1;
  doc["meta"] = {{"model", chart.meta.model},   {"backend", chart.meta.backend},
                 {"ambient_dim", chart.meta.ambient_dim}, {"theta0", chart.meta.theta0},
                 {"tag", chart.meta.tag},       {"region", region_json(chart.meta.region)}};
  json grid;
  grid["dim"] = g.dim;
  grid["coords"] = g.coords;
  grid["simplex_nodes"] = g.simplex_nodes;
  grid["simplex_wrap"] = g.simplex_wrap;
  grid["boundary_nodes"] = g.boundary_nodes;
  if (g.seam)
    grid["seam"] = json{{"axis", g.seam->axis}, {"span", g.seam->span}};
  else
    grid["seam"] = nullptr;
  grid["region"] = region_json(g.region);
  doc["grid"] = std::move(grid);

  json fields;
  fields["g"] = mat_array(chart.fields.g);
  fields["k"] = chart.fields.k;
  fields["w"] = vec_array(chart.fields.w);
  fields["dw"] = vec_array(chart.fields.dw);
  fields["weight"] = chart.fields.weight;
  fields["h"] = chart.fields.h;
  fields["h_node"] = chart.fields.h_node;
  doc["fields"] = std::move(fields);

  std::ofstream os(path);
  require(os.good(), "cannot open chart file for writing: " + path.string());
  os << doc.dump(1, '\t') << "\n";
}

Chart load_chart(const std::filesystem::path& path) {
  std::ifstream is(path);
  require(is.good(), "cannot open chart file: " + path.string());
  json doc = json::parse(is);
  require(doc.at("format") == "orbitsym-chart", "not a chart file: " + path.string());

  Chart chart;
  const json& meta = doc.at("meta");
  chart.meta.model = meta.at("model").get<std::string>();
  chart.meta.backend = meta.at("backend").get<std::string>();
  chart.meta.ambient_dim = meta.at("ambient_dim").get<int>();
  chart.meta.theta0 = meta.at("theta0").get<double>();
  chart.meta.tag = meta.at("tag").get<std::string>();
  chart.meta.region = region_from(meta.at("region"));

  const json& gj = doc.at("grid");
  Grid& g = chart.grid;
  g.dim = gj.at("dim").get<int>();
  g.coords = gj.at("coords").get<std::vector<double>>();
  g.simplex_nodes = gj.at("simplex_nodes").get<std::vector<int>>();
  g.simplex_wrap = gj.at("simplex_wrap").get<std::vector<std::uint8_t>>();
  g.boundary_nodes = gj.at("boundary_nodes").get<std::vector<int>>();
  if (!gj.at("seam").is_null())
    g.seam = Seam{gj.at("seam").at("axis").get<int>(), gj.at("seam").at("span").get<double>()};
  g.region = region_from(gj.at("region"));
  for (int a = 0; a < g.dim; ++a) {
    g.nodes_per_axis[a] =
        g.region.cells[a] + (g.region.periodic_axis == a ? 0 : 1);
    g.step[a] = (g.region.hi[a] - g.region.lo[a]) / g.region.cells[a];
  }

  // rebuild cached simplex geometry
  const int nv = g.dim + 1;
  const int n_simplices = static_cast<int>(g.simplex_nodes.size()) / nv;
  g.coord_volume.resize(n_simplices);
  g.basis_grad.resize(n_simplices);
  g.barycenter.resize(n_simplices);
  const double dfact = (g.dim == 2) ? 2.0 : 6.0;
  for (int s = 0; s < n_simplices; ++s) {
    Mat edges(g.dim, g.dim);
    const Vec x0 = g.vertex_coord(s, 0);
    Vec bary = x0;
    for (int v = 1; v < nv; ++v) {
      const Vec xv = g.vertex_coord(s, v);
      edges.col(v - 1) = xv - x0;
      bary += xv;
    }
    g.barycenter[s] = bary / nv;
    const double det = edges.determinant();
    require(det > 0.0, "loaded grid has a degenerate simplex");
    g.coord_volume[s] = det / dfact;
    const Mat inv_t = edges.inverse().transpose();
    BasisGrad& b = g.basis_grad[s];
    b.resize(g.dim, nv);
    b.col(0).setZero();
    for (int v = 1; v < nv; ++v) {
      b.col(v) = inv_t.col(v - 1);
      b.col(0) -= b.col(v);
    }
  }

  const json& fj = doc.at("fields");
  FieldData& f = chart.fields;
  f.g = mat_array_from(fj.at("g"), g.dim);
  f.k = fj.at("k").get<std::vector<double>>();
  f.w = vec_array_from(fj.at("w"), g.dim);
  f.dw = vec_array_from(fj.at("dw"), g.dim == 2 ? 1 : 3);
  f.weight = fj.at("weight").get<std::vector<double>>();
  f.h = fj.at("h").get<std::vector<double>>();
  f.h_node = fj.at("h_node").get<std::vector<double>>();
  f.g_inv.resize(f.g.size());
  for (std::size_t s = 0; s < f.g.size(); ++s) f.g_inv[s] = f.g[s].inverse();
  return chart;
}

struct CsvWriter::Impl {
  std::ofstream os;
};

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : impl_(new Impl) {
  impl_->os.open(path);
  require(impl_->os.good(), "cannot open csv file for writing: " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i)
    impl_->os << header[i] << (i + 1 < header.size() ? "," : "");
  impl_->os << "\n";
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i)
    impl_->os << format_double(values[i]) << (i + 1 < values.size() ? "," : "");
  impl_->os << "\n";
}

}  // namespace orbitsym
