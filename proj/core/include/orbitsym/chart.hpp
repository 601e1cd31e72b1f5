#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "orbitsym/geometry.hpp"
#include "orbitsym/types.hpp"

namespace orbitsym {

/// Discretized orbit-space patch: a structured simplicial grid over a
/// coordinate box, per-simplex field data sampled at barycenters, and an
/// optional periodic seam along one coordinate axis.  Functions with winding
/// jump by (winding * period) across the seam; the jump is carried by the
/// gradient of the seam-adjacent simplices.

struct Region {
  int dim = 2;                         // 2 or 3
  std::array<double, 3> lo{0, 0, 0};
  std::array<double, 3> hi{1, 1, 1};
  std::array<int, 3> cells{16, 16, 16};
  int periodic_axis = -1;              // -1: none
};

struct Seam {
  int axis = 0;
  double span = 0.0;  // coordinate length of the period
};

struct Grid {
  int dim = 2;
  std::vector<double> coords;          // node coordinates, dim per node
  std::vector<int> simplex_nodes;      // (dim+1) per simplex
  std::vector<std::uint8_t> simplex_wrap;  // 1 if the vertex is the wrapped seam copy
  std::vector<int> boundary_nodes;
  std::optional<Seam> seam;

  // structured-lattice bookkeeping
  Region region;
  std::array<int, 3> nodes_per_axis{0, 0, 0};
  std::array<double, 3> step{0, 0, 0};

  // cached per-simplex geometry
  std::vector<double> coord_volume;
  std::vector<BasisGrad> basis_grad;
  std::vector<Vec> barycenter;

  int n_nodes() const { return static_cast<int>(coords.size()) / dim; }
  int n_simplices() const { return static_cast<int>(coord_volume.size()); }
  Vec node(int i) const;
  // vertex coordinate with the seam wrap applied
  Vec vertex_coord(int simplex, int vertex) const;
};

struct FieldData {
  std::vector<Mat> g;
  std::vector<Mat> g_inv;
  std::vector<double> k;
  std::vector<Vec> w;        // covector per simplex
  std::vector<Vec> dw;       // exterior derivative components (01[,02,12])
  std::vector<double> weight;  // sqrt(det g) * coordinate volume
  std::vector<double> h;       // piecewise-linear h at the barycenter
  std::vector<double> h_node;  // nodal h samples
};

/// Piecewise-linear scalar on the grid nodes.  winding/period describe the
/// multivalued part across the seam: the function jumps by winding * period.
struct NodalFunction {
  Eigen::VectorXd values;
  int winding = 0;
  double period = 0.0;

  static NodalFunction zero(int n) { return {Eigen::VectorXd::Zero(n), 0, 0.0}; }
};

struct ChartMeta {
  std::string model;        // cartesian | hyperbolic_polar | ch2_meridian | ch2_cone | ch2_full | synthetic
  std::string backend;      // euclidean | real_hyperbolic | complex_hyperbolic2 | none
  int ambient_dim = 0;
  double theta0 = 0.0;      // ch2_cone slice angle
  Region region;
  std::string tag;          // free-form label for synthetic charts
};

struct Chart {
  Grid grid;
  FieldData fields;
  ChartMeta meta;
};

using ScalarField = std::function<double(const Vec&)>;
using CovectorField = std::function<Vec(const Vec&)>;

enum class ChartModel { Cartesian, HyperbolicPolar, CH2Meridian, CH2Cone, CH2Full };

/// Build a chart over `region` with fields sampled from a closed-form
/// backend.  The region coordinates are the model's chart coordinates; for
/// the polar models axis 0 is the radial coordinate t and must stay
/// nonnegative.  h is sampled at the nodes.
///
/// Model/backend pairs: Cartesian needs Euclidean; HyperbolicPolar needs
/// RealHyperbolic (ambient dim 3, chart (t, phi)); the CH2 models need the
/// complex hyperbolic backend with chart coordinates (t, theta),
/// (t, phi) at fixed theta0, and (t, theta, phi) respectively.
Chart build_chart(const SpaceBackend& backend, ChartModel model, const Region& region,
                  const ScalarField& h, double theta0 = 0.0);

/// Synthetic chart: flat unit metric, k = 1, prescribed covector field w.
/// Used for manufactured solutions (w an exact gradient) and for prescribed
/// holonomy across a periodic seam.
Chart build_synthetic_chart(const Region& region, const ScalarField& h,
                            const CovectorField& w, const std::string& tag);

/// Exact gradient of the piecewise-linear interpolant, constant per simplex;
/// the seam jump winding*period is applied to wrapped vertices before
/// differencing.
std::vector<Vec> discrete_gradient(const Grid& grid, const NodalFunction& u);

/// Fixed-order sum of integrand * weight over all simplices.  Throws (naming
/// the simplex) on a non-finite integrand value.
double integrate(const Grid& grid, const FieldData& fields,
                 const std::vector<double>& per_simplex);

/// Loop integral of w along a closed node cycle.  Each consecutive node pair
/// (cyclically) must be an edge of the grid; w on an edge is the average of
/// the adjacent simplex values; edge vectors across the seam use the
/// minimal-image convention.
double loop_holonomy(const Grid& grid, const FieldData& fields,
                     const std::vector<int>& loop);

/// Sum of the sampled exterior derivative dw over the simplices whose
/// barycenter lies in the coordinate box [lo, hi], as a 2-form integral in
/// the plane of the two given axes.  Reference side of the Stokes check.
double dw_integral(const Grid& grid, const FieldData& fields, const Vec& lo, const Vec& hi,
                   int axis_a, int axis_b);

// lumped node weights (row sums of the mass lumping), and the weighted mean
Eigen::VectorXd lumped_weights(const Grid& grid, const FieldData& fields);
double weighted_mean(const Grid& grid, const FieldData& fields, const NodalFunction& u);
void project_mean_zero(const Grid& grid, const FieldData& fields, NodalFunction& u);

/// Node cycle running once around the periodic axis at the node closest to
/// the given values of the remaining coordinates.
std::vector<int> seam_loop(const Grid& grid, const std::vector<double>& fixed_coords);

}  // namespace orbitsym
