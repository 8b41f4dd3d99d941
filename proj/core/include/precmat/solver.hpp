#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "precmat/bounds.hpp"
#include "precmat/penalty.hpp"
#include "precmat/sym_matrix.hpp"

namespace precmat {

/// One accepted iterate. rel_error is NaN unless a reference solution was
/// supplied; rel_change is NaN on the initial record.
struct TraceRecord {
  long iter = 0;
  double elapsed_s = 0.0;
  double objective = 0.0;
  double step = 0.0;
  long batch_n = 0;  // Monte Carlo draws consumed this iteration (0 = exact gradient)
  long nnz = 0;
  double rel_change = 0.0;
  double rel_error = 0.0;
};

struct SolveResult {
  SymMatrix theta_hat;
  long iterations = 0;
  long restarts = 0;
  bool converged = false;
  double kkt_residual = 0.0;
  std::vector<TraceRecord> trace;
};

struct DetSolverConfig {
  /// Initial step; when absent: ell_star^2 in guaranteed mode, otherwise
  /// min(1 / lambda_max(S)^2, 10) with the restart loop as the safety net.
  std::optional<double> gamma0;
  double step_shrink = 0.5;  // gamma_r = gamma0 * step_shrink^r
  long max_restarts = 60;
  long max_iters = 20000;
  double rel_tol = 1e-8;
  /// Start point; default is diag(1 / S_ii) (inverse sample variances).
  std::optional<SymMatrix> theta0;
  /// Use gamma = ell_star^2 and clip theta0 into
  /// [ell_star, min(psi_ub, psi_star1)], which provably avoids restarts.
  bool guaranteed = false;
  double zero_tol = 1e-8;  // nnz reporting threshold
  /// When set, every trace record carries ||theta_k - ref||_F / ||ref||_F.
  std::optional<SymMatrix> reference;
  /// Stop once rel_error <= target (needs reference), but not before
  /// target_min_iters iterations.
  std::optional<double> target_rel_error;
  long target_min_iters = 0;
  /// Test hook invoked with every accepted iterate.
  std::function<void(long, const SymMatrix&)> iterate_observer;
};

/// Monte Carlo batch sizes N_k = ceil(base + k^exponent), k >= 0.
struct BatchSchedule {
  long base = 30;
  double exponent = 1.8;

  BatchSchedule() = default;
  BatchSchedule(long base_in, double exponent_in);
  long size(long k) const;
};

/// Averaging weights zeta_k = coefficient * k^(-decay), k >= 1. The decay
/// must lie in (0.5, 1] so the weights sum to infinity while their squares
/// sum finitely.
struct AveragingSchedule {
  double coefficient = 1.0;
  double decay = 0.7;

  AveragingSchedule() = default;
  AveragingSchedule(double coefficient_in, double decay_in);
  double weight(long k) const;
};

struct StochConfig {
  std::optional<double> gamma0;  // default 10, shrunk by restarts
  double step_shrink = 0.5;
  long max_restarts = 60;
  long max_iters = 1000;
  double rel_tol = 1e-4;
  /// rel_change must stay below rel_tol this many consecutive iterations
  /// before the run is declared convergent (single steps are noisy).
  long stable_iters = 5;
  std::uint64_t seed = 0;
  std::optional<BatchSchedule> batch;        // growing-batch variant
  std::optional<long> fixed_n;               // sample-recycling variant
  std::optional<AveragingSchedule> averaging;
  std::optional<SymMatrix> sigma0;  // initial covariance state; default identity
  std::optional<SymMatrix> theta0;
  double zero_tol = 1e-8;
  std::optional<SymMatrix> reference;
  std::optional<double> target_rel_error;
  long target_min_iters = 0;
  std::function<void(long, const SymMatrix&)> iterate_observer;
};

/// One relaxed proximal-gradient step Prox_gamma(theta - gamma (S - theta^{-1})).
/// The output may be indefinite; callers detect that with cholesky().
SymMatrix prox_grad_step(const SymMatrix& theta, const SymMatrix& s,
                         const ElasticNetPenalty& pen, double gamma);

/// Proximal gradient with exact gradients and step-size restart. Restarts
/// return to theta0 with the step scaled by step_shrink.
SolveResult solve_deterministic(const SymMatrix& s,
                                const ElasticNetPenalty& pen,
                                const DetSolverConfig& cfg = {});

/// Stochastic proximal gradient: the gradient's theta^{-1} term is replaced
/// by the outer-product average of N_k Gaussian draws, with N_k growing per
/// cfg.batch. Restarts keep the last positive definite iterate, halve the
/// step and double the batch base.
SolveResult solve_stochastic(const SymMatrix& s, const ElasticNetPenalty& pen,
                             const StochConfig& cfg);

/// Sample-recycling variant: a fixed batch of size cfg.fixed_n per iteration,
/// folded into a running covariance estimate with weights cfg.averaging.
/// Restarts keep the last positive definite iterate and reset the estimate
/// to sigma0.
SolveResult solve_averaged(const SymMatrix& s, const ElasticNetPenalty& pen,
                           const StochConfig& cfg);

/// Shared default start point: diag(1 / S_ii), with unit fallback where
/// S_ii <= 0.
SymMatrix default_start(const SymMatrix& s);

}  // namespace precmat
