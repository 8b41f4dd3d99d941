#include "precmat/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace precmat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Positive root of 2*lambda2*x^2 + b*x - 1 = 0 in the cancellation-free
// form; reduces to 1/b when lambda2 == 0 (and +inf if also b <= 0).
double penalized_root(double b, double lambda2) {
  if (lambda2 == 0.0 && b <= 0.0) return kInf;
  const double disc = std::sqrt(b * b + 8.0 * lambda2);
  if (b >= 0.0) return 2.0 / (b + disc);
  return (disc - b) / (4.0 * lambda2);
}

// c(t) from the l1 bound on the solution, evaluated at theta(t) = (S + t*lambda1*I)^{-1}.
double c_of_t(double t, const SymMatrix& s, const ElasticNetPenalty& pen,
              double ell_star) {
  const Index p = s.dim();
  Eigen::MatrixXd shifted = s.mat();
  shifted.diagonal().array() += t * pen.lambda1;
  SymMatrix theta_t;
  try {
    theta_t = invert_via_factor(cholesky(SymMatrix::from_lower(shifted)));
  } catch (const NotPositiveDefinite&) {
    return kInf;  // S slightly indefinite and t too small to regularize it
  }
  const double l1 = theta_t.mat().cwiseAbs().sum();
  const double tr = theta_t.trace();
  const double fro2 = theta_t.mat().squaredNorm();
  const double denom = pen.lambda1 * (1.0 - t);
  return (pen.lambda1 * l1 - t * pen.lambda1 * tr + pen.lambda2 * fro2 -
          pen.lambda2 * ell_star * ell_star * static_cast<double>(p)) /
         denom;
}

// Grid scan on {0.02, 0.04, ..., 0.98} followed by golden-section
// refinement around the grid minimum down to an interval of width 1e-4.
double minimize_c(const SymMatrix& s, const ElasticNetPenalty& pen,
                  double ell_star) {
  double best_t = 0.5;
  double best_c = kInf;
  for (int i = 1; i <= 49; ++i) {
    const double t = 0.02 * i;
    const double c = c_of_t(t, s, pen, ell_star);
    if (c < best_c) {
      best_c = c;
      best_t = t;
    }
  }
  double lo = std::max(1e-6, best_t - 0.02);
  double hi = std::min(1.0 - 1e-6, best_t + 0.02);
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = c_of_t(x1, s, pen, ell_star);
  double f2 = c_of_t(x2, s, pen, ell_star);
  while (hi - lo > 1e-4) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = c_of_t(x1, s, pen, ell_star);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = c_of_t(x2, s, pen, ell_star);
    }
  }
  return std::min(best_c, std::min(f1, f2));
}

}  // namespace

double ell_star_bound(const SymMatrix& s, const ElasticNetPenalty& pen) {
  const double mu =
      spectral_norm(s) + pen.lambda1 * static_cast<double>(s.dim());
  return penalized_root(mu, pen.lambda2);
}

SpectralBounds compute_bounds(const SymMatrix& s,
                              const ElasticNetPenalty& pen) {
  const auto p = static_cast<double>(s.dim());
  const auto [eig_lo, eig_hi] = extreme_eigenvalues(s);
  const double s_norm = std::max(std::abs(eig_lo), std::abs(eig_hi));

  SpectralBounds b{};
  b.mu = s_norm + pen.lambda1 * p;
  b.nu = eig_lo - pen.lambda1 * p;
  b.ell_star = penalized_root(b.mu, pen.lambda2);
  if (pen.lambda1 > 0.0) {
    b.u1 = (p - b.ell_star * s.trace() -
            2.0 * p * pen.lambda2 * b.ell_star * b.ell_star) /
           pen.lambda1;
    b.u2 = minimize_c(s, pen, b.ell_star);
  } else {
    b.u1 = kInf;  // the l1-based bounds carry no information at alpha == 0
    b.u2 = kInf;
  }
  b.psi_ub = std::min(b.u1, b.u2);
  b.psi_star1 = penalized_root(b.nu, pen.lambda2);
  b.psi_star =
      std::min(b.psi_star1, b.psi_ub + std::sqrt(p) * (b.psi_ub - b.ell_star));
  b.cond_ub = b.psi_ub / b.ell_star;
  return b;
}

double default_step(const SpectralBounds& b) {
  return b.ell_star * b.ell_star;
}

long iteration_budget(double ell, double psi, double epsilon, double q) {
  if (!(ell > 0.0) || !(ell <= psi) || !std::isfinite(psi)) {
    throw std::invalid_argument("iteration_budget: need 0 < ell <= psi < inf");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("iteration_budget: epsilon must be in (0,1)");
  }
  if (!(q > 1.0)) {
    throw std::invalid_argument("iteration_budget: q must be > 1");
  }
  const double ratio2 = (psi / ell) * (psi / ell);
  const double term1 = std::pow(ratio2 / epsilon, 1.0 / q);
  const double rho = 1.0 - 1.0 / ratio2;
  double term2 = 0.0;  // rho == 0: one-step contraction
  if (rho > 0.0) {
    term2 = std::log(1.0 / epsilon) / std::log(1.0 / rho);
  }
  return static_cast<long>(std::ceil(std::max(term1, term2)));
}

}  // namespace precmat
