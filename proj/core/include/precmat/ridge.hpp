#pragma once

#include <optional>

#include "precmat/data_types.hpp"
#include "precmat/sym_matrix.hpp"

namespace precmat {

/// Closed-form solution of the pure-ridge problem (alpha == 0): in the
/// eigenbasis of S, each solution eigenvalue solves
/// lambda*sigma^2 + d*sigma - 1 = 0.
struct RidgeSolution {
  SymMatrix theta_hat;
  Eigen::VectorXd sigma;  // solution eigenvalues, aligned with d
  Eigen::VectorXd d;      // eigenvalues of S, ascending
  /// Full eigenbasis of S; absent on the n < p data path, which never
  /// materializes a p x p basis.
  std::optional<Spectrum> spectrum_of_s;
};

RidgeSolution solve_ridge_exact(const SymMatrix& s, double lambda);

/// Ridge solution straight from an n x p data matrix. For n < p the n
/// nonzero eigenvalues of S = X'X/n come from an SVD of X (O(n^2 p)); the
/// orthogonal complement gets sigma = 1/sqrt(lambda). Delegates to the
/// dense path when n >= p.
RidgeSolution solve_ridge_from_data(const DatasetMatrix& x, double lambda);

}  // namespace precmat
