#include "precmat/penalty.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace precmat {

ElasticNetPenalty::ElasticNetPenalty(double lambda_in, double alpha_in)
    : lambda(lambda_in),
      alpha(alpha_in),
      lambda1(alpha_in * lambda_in),
      lambda2((1.0 - alpha_in) * lambda_in / 2.0) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("ElasticNetPenalty: lambda must be > 0");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("ElasticNetPenalty: alpha must be in [0,1]");
  }
}

SymMatrix prox(const SymMatrix& theta, double gamma,
               const ElasticNetPenalty& pen) {
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("prox: gamma must be > 0");
  }
  const double shift = pen.lambda1 * gamma;
  const double shrink = 1.0 + 2.0 * pen.lambda2 * gamma;
  const auto& x = theta.mat().array();
  Eigen::MatrixXd out =
      ((x.abs() - shift).max(0.0) * x.sign() / shrink).matrix();
  return SymMatrix::from_lower(out);
}

double penalty_value(const SymMatrix& theta, const ElasticNetPenalty& pen) {
  const auto& x = theta.mat().array();
  return pen.lambda1 * x.abs().sum() + pen.lambda2 * x.square().sum();
}

double objective_with_logdet(double log_det, const SymMatrix& theta,
                             const SymMatrix& s,
                             const ElasticNetPenalty& pen) {
  const double tr = theta.mat().cwiseProduct(s.mat()).sum();
  return -log_det + tr + penalty_value(theta, pen);
}

double objective(const SymMatrix& theta, const SymMatrix& s,
                 const ElasticNetPenalty& pen) {
  if (theta.dim() != s.dim()) {
    throw DimensionMismatch("objective: theta and S dimensions differ");
  }
  double log_det;
  try {
    log_det = cholesky(theta).log_det;
  } catch (const NotPositiveDefinite&) {
    return std::numeric_limits<double>::infinity();
  }
  return objective_with_logdet(log_det, theta, s, pen);
}

double kkt_residual(const SymMatrix& theta, const SymMatrix& s,
                    const ElasticNetPenalty& pen, double zero_tol) {
  const SymMatrix inv = invert_via_factor(cholesky(theta));
  const Eigen::MatrixXd grad =
      -inv.mat() + s.mat() + 2.0 * pen.lambda2 * theta.mat();
  double worst = 0.0;
  const Index p = theta.dim();
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) {
      const double t = theta(i, j);
      double violation;
      if (std::abs(t) > zero_tol) {
        violation = std::abs(grad(i, j) + pen.lambda1 * (t > 0 ? 1.0 : -1.0));
      } else {
        violation = std::max(0.0, std::abs(grad(i, j)) - pen.lambda1);
      }
      worst = std::max(worst, violation);
    }
  }
  return worst;
}

}  // namespace precmat
