#include "precmat/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "precmat/data_io.hpp"

namespace precmat {

namespace {

double wall_time(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

double tuned_penalty_cut(const SymMatrix& s, double offdiag_fraction) {
  const Index p = s.dim();
  std::vector<double> mags;
  mags.reserve(static_cast<std::size_t>(p * (p - 1) / 2));
  for (Index j = 0; j < p; ++j) {
    for (Index i = j + 1; i < p; ++i) {
      mags.push_back(std::abs(s(i, j)));
    }
  }
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  const double want = offdiag_fraction * static_cast<double>(mags.size());
  const auto keep = static_cast<std::size_t>(
      std::min<double>(std::max(0.0, want), static_cast<double>(mags.size() - 1)));
  return mags[keep];
}

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Deterministic:
      return "det";
    case SolverKind::Stochastic:
      return "stoch";
    case SolverKind::Averaged:
      return "averaged";
  }
  return "unknown";
}

std::vector<BenchRow> run_bench(const BenchSpec& spec) {
  std::vector<BenchRow> rows;
  for (const Index p : spec.p_list) {
    for (int seed = 0; seed < spec.seeds; ++seed) {
      const double density =
          spec.density > 0.0 ? spec.density : 10.0 / static_cast<double>(p);
      const SyntheticProblem prob = generate_synthetic(
          p, density, 4.0, 1.0, static_cast<std::uint64_t>(seed));
      // Keep roughly 10/p of the p^2 entries: 9/(p-1) of the off-diagonal
      // pairs plus the diagonal.
      const double lambda =
          spec.lambda
              ? *spec.lambda
              : tuned_penalty_cut(prob.s, 9.0 / static_cast<double>(p - 1)) /
                    spec.alpha;
      const ElasticNetPenalty pen(lambda, spec.alpha);

      DetSolverConfig ref_cfg;
      ref_cfg.gamma0 = 10.0;
      ref_cfg.rel_tol = spec.reference_rel_tol;
      ref_cfg.max_iters = 5000;
      const SolveResult reference = solve_deterministic(prob.s, pen, ref_cfg);

      for (const SolverKind kind : spec.algorithms) {
        BenchRow row;
        row.p = p;
        row.seed = static_cast<std::uint64_t>(seed);
        row.algorithm = kind;
        row.target_tol = spec.target_tol;
        const auto t0 = std::chrono::steady_clock::now();
        SolveResult run;
        if (kind == SolverKind::Deterministic) {
          DetSolverConfig cfg;
          cfg.gamma0 = 10.0;
          cfg.rel_tol = 0.0;  // stop on the error target only
          cfg.max_iters = spec.max_iters;
          cfg.reference = reference.theta_hat;
          cfg.target_rel_error = spec.target_tol;
          run = solve_deterministic(prob.s, pen, cfg);
        } else {
          StochConfig cfg;
          cfg.seed = static_cast<std::uint64_t>(seed) + 1000;
          cfg.rel_tol = 0.0;
          cfg.max_iters = spec.max_iters;
          cfg.reference = reference.theta_hat;
          cfg.target_rel_error = spec.target_tol;
          run = kind == SolverKind::Stochastic
                    ? solve_stochastic(prob.s, pen, cfg)
                    : solve_averaged(prob.s, pen, cfg);
        }
        row.seconds = wall_time(t0);
        row.iterations = run.iterations;
        row.reached = run.converged;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = "p,seed,algorithm,target_tol,seconds,iterations,reached\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%ld,%llu,%s,%g,%.6f,%ld,%d\n",
                  static_cast<long>(r.p),
                  static_cast<unsigned long long>(r.seed),
                  to_string(r.algorithm).c_str(), r.target_tol, r.seconds,
                  r.iterations, r.reached ? 1 : 0);
    out += buf;
  }
  return out;
}

}  // namespace precmat
