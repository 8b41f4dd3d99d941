#pragma once

#include <cstdint>

#include "precmat/sym_matrix.hpp"

namespace precmat {

/// n samples (rows) of p variables (columns).
struct DatasetMatrix {
  Eigen::MatrixXd values;

  Index n() const { return values.rows(); }
  Index p() const { return values.cols(); }
};

/// A generated instance: ground-truth precision theta_star with
/// lambda_min(theta_star) == ell by construction, ceil(p/2) Gaussian samples
/// drawn from its inverse, and their sample covariance.
struct SyntheticProblem {
  SymMatrix theta_star;
  DatasetMatrix x;
  SymMatrix s;
  std::uint64_t seed = 0;
  double density = 0.0;
  double magnitude = 0.0;
  double ell = 0.0;
};

}  // namespace precmat
