#include "precmat/sym_matrix.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

namespace precmat {

SymMatrix SymMatrix::from_lower(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("from_lower: matrix is not square");
  }
  SymMatrix a;
  a.m_ = m.selfadjointView<Eigen::Lower>();
  return a;
}

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("from_dense: matrix is not square");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= tol * scale)) {
    throw NotSymmetric("matrix deviates from symmetry by " +
                       std::to_string(asym));
  }
  return from_lower(0.5 * (m + m.transpose()));
}

Index SymMatrix::count_nonzeros(double tol) const {
  return (m_.array().abs() > tol).count();
}

SpdFactor cholesky(const SymMatrix& a) {
  Eigen::LLT<Eigen::MatrixXd> llt(a.mat());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("Cholesky failed: matrix is not positive definite");
  }
  SpdFactor f;
  f.lower = llt.matrixL();
  const auto diag = f.lower.diagonal();
  if (!diag.allFinite() || (diag.array() <= 0.0).any()) {
    throw NotPositiveDefinite("Cholesky produced a non-positive or non-finite pivot");
  }
  f.log_det = 2.0 * diag.array().log().sum();
  return f;
}

SymMatrix invert_via_factor(const SpdFactor& f) {
  const Index p = f.dim();
  // A^{-1} = L^{-T} L^{-1}; solve against the identity, then mirror the
  // lower triangle to remove round-off asymmetry.
  Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(p, p);
  f.lower.triangularView<Eigen::Lower>().solveInPlace(inv);
  f.lower.transpose().triangularView<Eigen::Upper>().solveInPlace(inv);
  return SymMatrix::from_lower(inv);
}

std::pair<double, double> extreme_eigenvalues(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.mat(),
                                                    Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw ConvergenceFailure("symmetric eigensolver did not converge");
  }
  const auto& d = es.eigenvalues();
  return {d(0), d(d.size() - 1)};
}

double spectral_norm(const SymMatrix& a) {
  auto [lo, hi] = extreme_eigenvalues(a);
  return std::max(std::abs(lo), std::abs(hi));
}

Spectrum eigendecompose(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.mat());
  if (es.info() != Eigen::Success) {
    throw ConvergenceFailure("symmetric eigensolver did not converge");
  }
  Spectrum s;
  s.eigenvalues = es.eigenvalues();
  s.eigenvectors = es.eigenvectors();
  return s;
}

SymMatrix clip_spectrum(const SymMatrix& a, double lo, double hi) {
  Spectrum s = eigendecompose(a);
  const Eigen::VectorXd clamped = s.eigenvalues.cwiseMax(lo).cwiseMin(hi);
  Eigen::MatrixXd m =
      s.eigenvectors * clamped.asDiagonal() * s.eigenvectors.transpose();
  return SymMatrix::from_lower(0.5 * (m + m.transpose()));
}

}  // namespace precmat
