#include "precmat/ridge.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace precmat {

namespace {

// Positive root of lambda*sigma^2 + d*sigma - 1 = 0, cancellation-free for
// large d >= 0.
double ridge_sigma(double d, double lambda) {
  return 2.0 / (d + std::sqrt(d * d + 4.0 * lambda));
}

}  // namespace

RidgeSolution solve_ridge_exact(const SymMatrix& s, double lambda) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("solve_ridge_exact: lambda must be > 0");
  }
  RidgeSolution out;
  out.spectrum_of_s = eigendecompose(s);
  const Index p = s.dim();
  out.d = out.spectrum_of_s->eigenvalues;
  out.sigma.resize(p);
  for (Index i = 0; i < p; ++i) {
    out.sigma(i) = ridge_sigma(out.d(i), lambda);
  }
  const Eigen::MatrixXd& u = out.spectrum_of_s->eigenvectors;
  Eigen::MatrixXd theta = u * out.sigma.asDiagonal() * u.transpose();
  out.theta_hat = SymMatrix::from_lower(0.5 * (theta + theta.transpose()));
  return out;
}

RidgeSolution solve_ridge_from_data(const DatasetMatrix& x, double lambda) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("solve_ridge_from_data: lambda must be > 0");
  }
  const Index n = x.n();
  const Index p = x.p();
  if (n < 1 || p < 1) {
    throw DimensionMismatch("solve_ridge_from_data: empty data matrix");
  }
  if (n >= p) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(p, p);
    s.selfadjointView<Eigen::Lower>().rankUpdate(
        x.values.transpose(), 1.0 / static_cast<double>(n));
    return solve_ridge_exact(SymMatrix::from_lower(s), lambda);
  }

  // S = X'X/n has at most n nonzero eigenvalues d_i = sv_i^2/n with
  // eigenvectors the right singular vectors of X; everything orthogonal to
  // the row space gets d = 0, i.e. sigma = 1/sqrt(lambda).
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x.values, Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  const Eigen::MatrixXd& v = svd.matrixV();
  const Index r = sv.size();  // == n here

  RidgeSolution out;
  out.d = Eigen::VectorXd::Zero(p);
  out.sigma.resize(p);
  const double sigma_null = ridge_sigma(0.0, lambda);
  // Ascending order: the p - r null-space eigenvalues first.
  for (Index i = 0; i < p - r; ++i) {
    out.sigma(i) = sigma_null;
  }
  for (Index i = 0; i < r; ++i) {
    // sv is sorted descending; place ascending at the tail.
    const double d = sv(r - 1 - i) * sv(r - 1 - i) / static_cast<double>(n);
    out.d(p - r + i) = d;
    out.sigma(p - r + i) = ridge_sigma(d, lambda);
  }

  Eigen::MatrixXd theta =
      Eigen::MatrixXd::Identity(p, p) * sigma_null;
  Eigen::VectorXd shift(r);
  for (Index i = 0; i < r; ++i) {
    const double d = sv(i) * sv(i) / static_cast<double>(n);
    shift(i) = ridge_sigma(d, lambda) - sigma_null;
  }
  theta += v * shift.asDiagonal() * v.transpose();
  out.theta_hat = SymMatrix::from_lower(0.5 * (theta + theta.transpose()));
  return out;
}

}  // namespace precmat
