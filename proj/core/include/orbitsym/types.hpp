#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace orbitsym {

// Chart-coordinate vectors/covectors and metric blocks. Chart dimension is
// 2 or 3 at runtime; the fixed capacity keeps these off the heap.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

// Per-simplex nodal basis gradients: column i is the coordinate gradient of
// the barycentric basis function of vertex i.
using BasisGrad = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 4>;

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Raised when sampled field data contradicts a backend guarantee
// (non-SPD metric, k < 1, ...).
struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

inline void require_domain(bool cond, const std::string& msg) {
  if (!cond) throw DomainError(msg);
}

}  // namespace orbitsym
