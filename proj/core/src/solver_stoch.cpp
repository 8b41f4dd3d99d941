#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "precmat/sampler.hpp"
#include "precmat/solver.hpp"

namespace precmat {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct StepOutcome {
  SymMatrix candidate;
  bool accepted = false;
};

// Detects a trajectory that keeps its iterates positive definite but stops
// descending (an oversized step turns the prox-gradient map into a
// bounded oscillation that the lambda_min <= 0 restart test never sees).
// Exact objectives are compared window-mean against window-mean so the
// Monte Carlo noise averages out.
class ProgressWatch {
 public:
  void record(double objective) { objs_.push_back(objective); }
  void reset() { objs_.clear(); }

  bool stalled() const {
    constexpr std::size_t kWindow = 8;
    if (objs_.size() < 2 * kWindow || objs_.size() % kWindow != 0) {
      return false;
    }
    double newer = 0.0;
    double older = 0.0;
    for (std::size_t i = 0; i < kWindow; ++i) {
      newer += objs_[objs_.size() - 1 - i];
      older += objs_[objs_.size() - 1 - kWindow - i];
    }
    return newer > older;
  }

 private:
  std::vector<double> objs_;
};

// Shared scaffolding for both stochastic variants: the prox step against a
// noisy gradient S - sigma, acceptance via the sampler's Cholesky (which is
// also how the next batch gets drawn).
StepOutcome try_step(GaussianSampler& sampler, const SymMatrix& theta,
                     const SymMatrix& s, const SymMatrix& sigma,
                     const ElasticNetPenalty& pen, double gamma) {
  const SymMatrix shifted =
      SymMatrix::from_lower(theta.mat() - gamma * (s.mat() - sigma.mat()));
  StepOutcome r{prox(shifted, gamma, pen), false};
  if (!r.candidate.all_finite()) {
    throw NonFiniteObjective("iterate contains non-finite entries");
  }
  try {
    sampler.set_precision(r.candidate);
    r.accepted = true;
  } catch (const NotPositiveDefinite&) {
    r.accepted = false;
  }
  return r;
}

}  // namespace

BatchSchedule::BatchSchedule(long base_in, double exponent_in)
    : base(base_in), exponent(exponent_in) {
  if (base < 1) {
    throw InvalidSchedule("batch base must be >= 1");
  }
  if (!(exponent > 1.0)) {
    throw InvalidSchedule("batch exponent must be > 1");
  }
}

long BatchSchedule::size(long k) const {
  return static_cast<long>(
      std::ceil(static_cast<double>(base) +
                std::pow(static_cast<double>(k), exponent)));
}

AveragingSchedule::AveragingSchedule(double coefficient_in, double decay_in)
    : coefficient(coefficient_in), decay(decay_in) {
  if (!(coefficient > 0.0)) {
    throw InvalidSchedule("averaging coefficient must be > 0");
  }
  if (!(decay > 0.5 && decay <= 1.0)) {
    throw InvalidSchedule("averaging decay must lie in (0.5, 1]");
  }
}

double AveragingSchedule::weight(long k) const {
  return coefficient * std::pow(static_cast<double>(k), -decay);
}

SolveResult solve_stochastic(const SymMatrix& s, const ElasticNetPenalty& pen,
                             const StochConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  BatchSchedule schedule = cfg.batch ? *cfg.batch : BatchSchedule(30, 1.8);
  if (schedule.base < 1 || !(schedule.exponent > 1.0)) {
    throw InvalidSchedule("batch schedule needs base >= 1 and exponent > 1");
  }

  const SymMatrix theta0 = cfg.theta0 ? *cfg.theta0 : default_start(s);
  double gamma = cfg.gamma0 ? *cfg.gamma0 : 10.0;
  // Stall-driven reductions never push the step below the provably safe
  // ell_star^2; smaller steps only slow the iterate's tracking of the
  // covariance estimate.
  const double ell = ell_star_bound(s, pen);
  const double gamma_floor = std::min(gamma, ell * ell);

  SolveResult out;
  SymMatrix theta = theta0;
  GaussianSampler sampler = sampler_from_precision(theta, cfg.seed);

  const bool has_ref = cfg.reference.has_value();
  const double ref_norm =
      has_ref ? std::max(cfg.reference->frobenius_norm(),
                         std::numeric_limits<double>::min())
              : 0.0;
  auto rel_error_of = [&](const SymMatrix& t) {
    return has_ref ? (t.mat() - cfg.reference->mat()).norm() / ref_norm : kNaN;
  };

  const double start_obj =
      objective_with_logdet(sampler.factor().log_det, theta, s, pen);
  if (!std::isfinite(start_obj)) {
    throw NonFiniteObjective("objective is not finite at the start point");
  }
  out.trace.push_back({0, seconds_since(t0), start_obj, gamma, 0,
                       theta.count_nonzeros(cfg.zero_tol), kNaN,
                       rel_error_of(theta)});

  long k_since_restart = 0;
  long base = schedule.base;
  long stable = 0;
  ProgressWatch watch;
  // PD failure: shrink the step, widen the batch floor and start the
  // schedule over, keeping the last positive definite iterate. A stall
  // (positive definite but not descending) is purely a step-size problem,
  // so only the step shrinks and the batch schedule keeps growing.
  auto restart = [&](const char* why, bool pd_failure) {
    if (!pd_failure && gamma <= gamma_floor) {
      watch.reset();  // already at the safe step; nothing left to shrink
      return;
    }
    if (++out.restarts > cfg.max_restarts) {
      throw MaxRestartsExceeded(std::string(why) + " after " +
                                std::to_string(cfg.max_restarts) +
                                " step reductions");
    }
    gamma *= cfg.step_shrink;
    if (pd_failure) {
      base *= 2;
      k_since_restart = 0;
    } else {
      gamma = std::max(gamma, gamma_floor);
    }
    stable = 0;
    watch.reset();
  };

  while (out.iterations < cfg.max_iters) {
    const long batch_n = static_cast<long>(
        std::ceil(static_cast<double>(base) +
                  std::pow(static_cast<double>(k_since_restart),
                           schedule.exponent)));
    const SampleCovariance sigma = sampler.draw_sample_cov(batch_n);
    StepOutcome step = try_step(sampler, theta, s, sigma.matrix, pen, gamma);
    if (!step.accepted) {
      restart("no positive definite trajectory", true);
      continue;
    }

    ++out.iterations;
    ++k_since_restart;
    const double rel_change = (step.candidate.mat() - theta.mat()).norm() /
                              std::max(1.0, theta.frobenius_norm());
    theta = std::move(step.candidate);

    const double obj =
        objective_with_logdet(sampler.factor().log_det, theta, s, pen);
    if (!std::isfinite(obj)) {
      throw NonFiniteObjective("objective is not finite");
    }
    const double rel_error = rel_error_of(theta);
    out.trace.push_back({out.iterations, seconds_since(t0), obj, gamma,
                         batch_n, theta.count_nonzeros(cfg.zero_tol),
                         rel_change, rel_error});
    if (cfg.iterate_observer) cfg.iterate_observer(out.iterations, theta);

    stable = rel_change <= cfg.rel_tol ? stable + 1 : 0;
    if (stable >= cfg.stable_iters) {
      out.converged = true;
      break;
    }
    if (cfg.target_rel_error && has_ref &&
        out.iterations >= cfg.target_min_iters &&
        rel_error <= *cfg.target_rel_error) {
      out.converged = true;
      break;
    }
    watch.record(obj);
    if (watch.stalled()) {
      restart("no descending trajectory", false);
    }
  }

  out.theta_hat = theta;
  out.kkt_residual = kkt_residual(theta, s, pen);
  return out;
}

SolveResult solve_averaged(const SymMatrix& s, const ElasticNetPenalty& pen,
                           const StochConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const long fixed_n = cfg.fixed_n ? *cfg.fixed_n : 400;
  if (fixed_n < 1) {
    throw InvalidSchedule("fixed_n must be >= 1");
  }
  AveragingSchedule schedule =
      cfg.averaging ? *cfg.averaging : AveragingSchedule(1.0, 0.7);
  if (!(schedule.coefficient > 0.0) ||
      !(schedule.decay > 0.5 && schedule.decay <= 1.0)) {
    throw InvalidSchedule("averaging decay must lie in (0.5, 1]");
  }

  const SymMatrix theta0 = cfg.theta0 ? *cfg.theta0 : default_start(s);
  const SymMatrix sigma0 =
      cfg.sigma0 ? *cfg.sigma0 : SymMatrix::identity(s.dim());
  double gamma = cfg.gamma0 ? *cfg.gamma0 : 10.0;

  SolveResult out;
  SymMatrix theta = theta0;
  SymMatrix sigma = sigma0;
  GaussianSampler sampler = sampler_from_precision(theta, cfg.seed);

  const bool has_ref = cfg.reference.has_value();
  const double ref_norm =
      has_ref ? std::max(cfg.reference->frobenius_norm(),
                         std::numeric_limits<double>::min())
              : 0.0;
  auto rel_error_of = [&](const SymMatrix& t) {
    return has_ref ? (t.mat() - cfg.reference->mat()).norm() / ref_norm : kNaN;
  };

  const double start_obj =
      objective_with_logdet(sampler.factor().log_det, theta, s, pen);
  if (!std::isfinite(start_obj)) {
    throw NonFiniteObjective("objective is not finite at the start point");
  }
  out.trace.push_back({0, seconds_since(t0), start_obj, gamma, 0,
                       theta.count_nonzeros(cfg.zero_tol), kNaN,
                       rel_error_of(theta)});

  long k_since_restart = 0;
  long stable = 0;
  ProgressWatch watch;
  // PD failure: shrink the step and start the covariance estimate over
  // from sigma0, keeping the last positive definite iterate. A stall only
  // shrinks the step (the running estimate is still sound), floored at the
  // current averaging weight: the iterate has to keep tracking the moving
  // estimate, whose drift is paced by zeta, while the fluctuation level
  // scales with gamma itself.
  auto restart = [&](const char* why, bool pd_failure) {
    const double floor = schedule.weight(k_since_restart + 1);
    if (!pd_failure && gamma <= floor) {
      watch.reset();
      return;
    }
    if (++out.restarts > cfg.max_restarts) {
      throw MaxRestartsExceeded(std::string(why) + " after " +
                                std::to_string(cfg.max_restarts) +
                                " step reductions");
    }
    gamma *= cfg.step_shrink;
    if (pd_failure) {
      sigma = sigma0;
      k_since_restart = 0;
    } else {
      gamma = std::max(gamma, floor);
    }
    stable = 0;
    watch.reset();
  };

  while (out.iterations < cfg.max_iters) {
    const SampleCovariance batch = sampler.draw_sample_cov(fixed_n);
    const double zeta = schedule.weight(k_since_restart + 1);
    SymMatrix blended = SymMatrix::from_lower(
        sigma.mat() + zeta * (batch.matrix.mat() - sigma.mat()));
    StepOutcome step = try_step(sampler, theta, s, blended, pen, gamma);
    if (!step.accepted) {
      restart("no positive definite trajectory", true);
      continue;
    }

    ++out.iterations;
    ++k_since_restart;
    sigma = std::move(blended);
    const double rel_change = (step.candidate.mat() - theta.mat()).norm() /
                              std::max(1.0, theta.frobenius_norm());
    theta = std::move(step.candidate);

    const double obj =
        objective_with_logdet(sampler.factor().log_det, theta, s, pen);
    if (!std::isfinite(obj)) {
      throw NonFiniteObjective("objective is not finite");
    }
    const double rel_error = rel_error_of(theta);
    out.trace.push_back({out.iterations, seconds_since(t0), obj, gamma,
                         fixed_n, theta.count_nonzeros(cfg.zero_tol),
                         rel_change, rel_error});
    if (cfg.iterate_observer) cfg.iterate_observer(out.iterations, theta);

    stable = rel_change <= cfg.rel_tol ? stable + 1 : 0;
    if (stable >= cfg.stable_iters) {
      out.converged = true;
      break;
    }
    if (cfg.target_rel_error && has_ref &&
        out.iterations >= cfg.target_min_iters &&
        rel_error <= *cfg.target_rel_error) {
      out.converged = true;
      break;
    }
    watch.record(obj);
    if (watch.stalled()) {
      restart("no descending trajectory", false);
    }
  }

  out.theta_hat = theta;
  out.kkt_residual = kkt_residual(theta, s, pen);
  return out;
}

}  // namespace precmat
