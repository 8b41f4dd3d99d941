#pragma once

#include "precmat/sym_matrix.hpp"

namespace precmat {

/// Elastic-net penalty sum_ij (lambda1 |a_ij| + lambda2 a_ij^2) with
/// lambda1 = alpha*lambda and lambda2 = (1-alpha)*lambda/2. The sum runs
/// over all p^2 ordered pairs; diagonals are penalized.
struct ElasticNetPenalty {
  double lambda;
  double alpha;
  double lambda1;
  double lambda2;

  ElasticNetPenalty(double lambda_in, double alpha_in);
};

/// Entrywise soft-threshold-and-shrink: each entry maps to
/// sign(x) * max(|x| - alpha*lambda*gamma, 0) / (1 + (1-alpha)*lambda*gamma).
SymMatrix prox(const SymMatrix& theta, double gamma,
               const ElasticNetPenalty& pen);

double penalty_value(const SymMatrix& theta, const ElasticNetPenalty& pen);

/// -log det(theta) + Tr(theta S) + penalty, or +infinity when theta is not
/// positive definite (extended-value convention).
double objective(const SymMatrix& theta, const SymMatrix& s,
                 const ElasticNetPenalty& pen);

/// Same, with log det(theta) already known (e.g. from a cached factor).
double objective_with_logdet(double log_det, const SymMatrix& theta,
                             const SymMatrix& s, const ElasticNetPenalty& pen);

/// Max stationarity violation at theta. With G = -theta^{-1} + S + 2*lambda2*theta,
/// entries with |theta_ij| > zero_tol contribute |G_ij + lambda1*sign(theta_ij)|
/// and the rest contribute max(0, |G_ij| - lambda1). Zero iff theta is the
/// minimizer.
double kkt_residual(const SymMatrix& theta, const SymMatrix& s,
                    const ElasticNetPenalty& pen, double zero_tol = 1e-12);

}  // namespace precmat
