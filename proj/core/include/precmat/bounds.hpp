#pragma once

#include "precmat/penalty.hpp"
#include "precmat/sym_matrix.hpp"

namespace precmat {

/// Computable spectral box for the solution and the iterates. The solution's
/// eigenvalues lie in [ell_star, psi_ub]; iterates started inside
/// [ell_star, min(psi_ub, psi_star1)] with step <= ell_star^2 stay in
/// [ell_star, psi_star].
struct SpectralBounds {
  double mu;         // ||S||_2 + lambda1 * p
  double nu;         // lambda_min(S) - lambda1 * p
  double ell_star;   // lower bound on the solution spectrum
  double u1;         // trace-based l1 bound (infinite when lambda1 == 0)
  double u2;         // min_t c(t) bound (infinite when lambda1 == 0)
  double psi_ub;     // min(u1, u2)
  double psi_star1;  // fixed point of the prox update's max-eigenvalue map
  double psi_star;   // min(psi_star1, psi_ub + sqrt(p) (psi_ub - ell_star))
  double cond_ub;    // psi_ub / ell_star
};

SpectralBounds compute_bounds(const SymMatrix& s, const ElasticNetPenalty& pen);

/// ell_star alone (one extreme-eigenvalue computation), for callers that
/// need the safe step floor without the full (and costly) psi bounds.
double ell_star_bound(const SymMatrix& s, const ElasticNetPenalty& pen);

/// The guaranteed-safe step size ell_star^2.
double default_step(const SpectralBounds& b);

/// Iterations needed to push the expected squared error below epsilon when
/// batches grow like ceil(N + k^q): the larger of
/// ((psi/ell)^2 / epsilon)^(1/q) and log(1/epsilon)/log(1/rho) with
/// rho = 1 - (ell/psi)^2. ell == psi gives one-step contraction and only the
/// first term applies.
long iteration_budget(double ell, double psi, double epsilon, double q);

}  // namespace precmat
