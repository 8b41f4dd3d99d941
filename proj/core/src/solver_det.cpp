#include <chrono>
#include <cmath>
#include <limits>

#include "precmat/solver.hpp"

namespace precmat {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}
}  // namespace

SymMatrix default_start(const SymMatrix& s) {
  const Index p = s.dim();
  Eigen::VectorXd d(p);
  for (Index i = 0; i < p; ++i) {
    d(i) = s(i, i) > 0.0 ? 1.0 / s(i, i) : 1.0;
  }
  return SymMatrix::diagonal(d);
}

SymMatrix prox_grad_step(const SymMatrix& theta, const SymMatrix& s,
                         const ElasticNetPenalty& pen, double gamma) {
  const SymMatrix inv = invert_via_factor(cholesky(theta));
  const SymMatrix shifted =
      SymMatrix::from_lower(theta.mat() - gamma * (s.mat() - inv.mat()));
  return prox(shifted, gamma, pen);
}

SolveResult solve_deterministic(const SymMatrix& s,
                                const ElasticNetPenalty& pen,
                                const DetSolverConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();

  SymMatrix theta0 = cfg.theta0 ? *cfg.theta0 : default_start(s);
  double gamma;
  if (cfg.guaranteed) {
    const SpectralBounds b = compute_bounds(s, pen);
    gamma = cfg.gamma0 ? *cfg.gamma0 : default_step(b);
    const double hi = std::max(b.ell_star, std::min(b.psi_ub, b.psi_star1));
    theta0 = clip_spectrum(theta0, b.ell_star, hi);
  } else if (cfg.gamma0) {
    gamma = *cfg.gamma0;
  } else {
    const double top = spectral_norm(s);
    gamma = top > 0.0 ? std::min(1.0 / (top * top), 10.0) : 10.0;
  }

  SolveResult out;
  out.trace.reserve(64);

  SymMatrix theta = theta0;
  SpdFactor factor = cholesky(theta);
  SpdFactor theta0_factor = factor;

  const bool has_ref = cfg.reference.has_value();
  const double ref_norm =
      has_ref ? std::max(cfg.reference->frobenius_norm(),
                         std::numeric_limits<double>::min())
              : 0.0;
  auto rel_error_of = [&](const SymMatrix& t) {
    return has_ref ? (t.mat() - cfg.reference->mat()).norm() / ref_norm : kNaN;
  };

  double prev_obj = objective_with_logdet(factor.log_det, theta, s, pen);
  if (!std::isfinite(prev_obj)) {
    throw NonFiniteObjective("objective is not finite at the start point");
  }
  out.trace.push_back({0, seconds_since(t0), prev_obj, gamma, 0,
                       theta.count_nonzeros(cfg.zero_tol), kNaN,
                       rel_error_of(theta)});

  while (out.iterations < cfg.max_iters) {
    const SymMatrix inv = invert_via_factor(factor);
    const SymMatrix shifted =
        SymMatrix::from_lower(theta.mat() - gamma * (s.mat() - inv.mat()));
    const SymMatrix candidate = prox(shifted, gamma, pen);
    if (!candidate.all_finite()) {
      throw NonFiniteObjective("iterate contains non-finite entries");
    }

    SpdFactor cand_factor;
    try {
      cand_factor = cholesky(candidate);
    } catch (const NotPositiveDefinite&) {
      if (++out.restarts > cfg.max_restarts) {
        throw MaxRestartsExceeded("no positive definite trajectory after " +
                                  std::to_string(cfg.max_restarts) +
                                  " step reductions");
      }
      gamma *= cfg.step_shrink;
      theta = theta0;
      factor = theta0_factor;
      prev_obj = objective_with_logdet(factor.log_det, theta, s, pen);
      continue;
    }

    const double obj =
        objective_with_logdet(cand_factor.log_det, candidate, s, pen);
    if (!std::isfinite(obj)) {
      throw NonFiniteObjective("objective is not finite");
    }
    // A positive definite candidate can still break the descent property
    // when the step exceeds what the local curvature allows (at p = 1 the
    // map then oscillates without ever losing definiteness). Reject the
    // step and shrink, keeping the progress made so far.
    if (obj > prev_obj + 1e-12 * std::max(1.0, std::abs(prev_obj))) {
      if (++out.restarts > cfg.max_restarts) {
        throw MaxRestartsExceeded("no descending trajectory after " +
                                  std::to_string(cfg.max_restarts) +
                                  " step reductions");
      }
      gamma *= cfg.step_shrink;
      continue;
    }

    ++out.iterations;
    const double rel_change = (candidate.mat() - theta.mat()).norm() /
                              std::max(1.0, theta.frobenius_norm());
    theta = candidate;
    factor = std::move(cand_factor);
    prev_obj = obj;
    const double rel_error = rel_error_of(theta);
    out.trace.push_back({out.iterations, seconds_since(t0), obj, gamma, 0,
                         theta.count_nonzeros(cfg.zero_tol), rel_change,
                         rel_error});
    if (cfg.iterate_observer) cfg.iterate_observer(out.iterations, theta);

    if (rel_change <= cfg.rel_tol) {
      out.converged = true;
      break;
    }
    if (cfg.target_rel_error && has_ref &&
        out.iterations >= cfg.target_min_iters &&
        rel_error <= *cfg.target_rel_error) {
      out.converged = true;
      break;
    }
  }

  out.theta_hat = theta;
  out.kkt_residual = kkt_residual(theta, s, pen);
  return out;
}

}  // namespace precmat
