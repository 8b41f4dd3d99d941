#pragma once

#include <Eigen/Dense>
#include <utility>

#include "precmat/errors.hpp"

namespace precmat {

using Index = Eigen::Index;

/// Dense symmetric p x p matrix. Writes go through set(), which mirrors the
/// entry into both triangles, so the stored data is symmetric bit for bit.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Index p) : m_(Eigen::MatrixXd::Zero(p, p)) {}

  static SymMatrix identity(Index p) {
    SymMatrix a;
    a.m_ = Eigen::MatrixXd::Identity(p, p);
    return a;
  }

  static SymMatrix diagonal(const Eigen::VectorXd& d) {
    SymMatrix a;
    a.m_ = d.asDiagonal();
    return a;
  }

  /// Mirrors the lower triangle of `m` into both triangles. The caller
  /// guarantees finiteness; no symmetry check is performed.
  static SymMatrix from_lower(const Eigen::MatrixXd& m);

  /// Accepts a matrix that is symmetric up to `tol` (scaled by the largest
  /// absolute entry), averages the triangles and mirrors. Throws
  /// NotSymmetric or DimensionMismatch otherwise.
  static SymMatrix from_dense(const Eigen::MatrixXd& m, double tol = 1e-12);

  Index dim() const { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  void set(Index i, Index j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  /// Full dense view; symmetric by construction.
  const Eigen::MatrixXd& mat() const { return m_; }

  double frobenius_norm() const { return m_.norm(); }
  double trace() const { return m_.trace(); }
  bool all_finite() const { return m_.allFinite(); }

  /// Number of entries with |a_ij| > tol, counted over all p^2 positions.
  Index count_nonzeros(double tol) const;

 private:
  Eigen::MatrixXd m_;
};

/// Lower-triangular Cholesky factor L with A = L L^T, plus
/// log det A = 2 sum_i log L_ii.
struct SpdFactor {
  Eigen::MatrixXd lower;
  double log_det = 0.0;

  Index dim() const { return lower.rows(); }
};

/// Eigendecomposition A = U diag(d) U^T with d sorted ascending.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  Index dim() const { return eigenvalues.size(); }
};

/// Factorizes a symmetric matrix, throwing NotPositiveDefinite when a pivot
/// is non-positive or not finite. This is the positive-definiteness test
/// used by all solvers.
SpdFactor cholesky(const SymMatrix& a);

/// A^{-1} from the factor; the result is symmetrized after the triangular
/// solves so it is bitwise symmetric.
SymMatrix invert_via_factor(const SpdFactor& f);

/// (lambda_min, lambda_max) of a symmetric matrix.
std::pair<double, double> extreme_eigenvalues(const SymMatrix& a);

/// Spectral norm ||A||_2 = max(|lambda_min|, |lambda_max|).
double spectral_norm(const SymMatrix& a);

Spectrum eigendecompose(const SymMatrix& a);

/// Projects the spectrum of `a` onto [lo, hi] (eigenvalue clamping).
SymMatrix clip_spectrum(const SymMatrix& a, double lo, double hi);

}  // namespace precmat
