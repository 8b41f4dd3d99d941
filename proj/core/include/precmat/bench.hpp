#pragma once

#include <optional>
#include <string>
#include <vector>

#include "precmat/threshold.hpp"

namespace precmat {

/// Time-to-tolerance protocol: per (p, seed, algorithm), generate a
/// synthetic instance, compute a high-accuracy deterministic reference, then
/// time each algorithm until ||theta_k - ref||_F / ||ref||_F <= target_tol.
struct BenchSpec {
  std::vector<Index> p_list;
  int seeds = 1;
  std::vector<SolverKind> algorithms;
  double target_tol = 0.1;
  double alpha = 0.9;
  /// Penalty strength; when absent, lambda is tuned per instance via
  /// tuned_penalty_cut so the solution keeps roughly 10/p of its entries.
  std::optional<double> lambda;
  double density = 0.0;  // 0 means 10/p
  long max_iters = 2000;
  double reference_rel_tol = 1e-8;
};

/// The |s_ij| off-diagonal quantile that keeps `offdiag_fraction` of the
/// pairs above it. Setting alpha*lambda to this cut makes the thresholded
/// graph (and hence, approximately, the solution support) carry that edge
/// fraction.
double tuned_penalty_cut(const SymMatrix& s, double offdiag_fraction);

struct BenchRow {
  Index p = 0;
  std::uint64_t seed = 0;
  SolverKind algorithm = SolverKind::Deterministic;
  double target_tol = 0.0;
  double seconds = 0.0;
  long iterations = 0;
  bool reached = false;
};

std::vector<BenchRow> run_bench(const BenchSpec& spec);

std::string to_string(SolverKind kind);

/// CSV rows: p, seed, algorithm, target_tol, seconds, iterations, reached.
std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace precmat
