#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "precmat/data_io.hpp"
#include "precmat/threshold.hpp"
#include "test_helpers.hpp"

using namespace precmat;
using precmat::testing::rel_frobenius;

namespace {

bool same_partition(const ComponentPartition& a, const ComponentPartition& b) {
  return a.components == b.components;
}

}  // namespace

TEST_SUITE_BEGIN("threshold");

TEST_CASE("diagonal covariance gives singletons") {
  Eigen::VectorXd d(5);
  d << 1, 2, 3, 4, 5;
  const ComponentPartition parts =
      threshold_components(SymMatrix::diagonal(d), ElasticNetPenalty(1.0, 0.9));
  CHECK(parts.components.size() == 5);
  for (Index i = 0; i < 5; ++i) {
    CHECK(parts.components[static_cast<std::size_t>(i)] ==
          std::vector<Index>{i});
    CHECK(parts.sizes[static_cast<std::size_t>(i)] == 1);
  }
}

TEST_CASE("transitivity through a middle node") {
  SymMatrix s(3);
  s.set(0, 0, 1.0);
  s.set(1, 1, 1.0);
  s.set(2, 2, 1.0);
  s.set(1, 0, 0.8);
  s.set(2, 1, 0.8);
  s.set(2, 0, 0.1);
  const ElasticNetPenalty pen(0.5, 1.0);  // cut at 0.5
  const ComponentPartition parts = threshold_components(s, pen);
  CHECK(parts.components.size() == 1);
  CHECK(parts.components[0] == std::vector<Index>{0, 1, 2});

  const ThresholdGraph g = threshold_graph(s, pen);
  CHECK(g.edges.size() == 2);
}

TEST_CASE("single strong pair splits off") {
  SymMatrix s(3);
  s.set(0, 0, 1.0);
  s.set(1, 1, 1.0);
  s.set(2, 2, 1.0);
  s.set(1, 0, 0.8);
  const ComponentPartition parts =
      threshold_components(s, ElasticNetPenalty(0.5, 1.0));
  REQUIRE(parts.components.size() == 2);
  CHECK(parts.components[0] == std::vector<Index>{0, 1});
  CHECK(parts.components[1] == std::vector<Index>{2});
}

TEST_CASE("exact tie is not an edge") {
  SymMatrix s(2);
  s.set(0, 0, 1.0);
  s.set(1, 1, 1.0);
  s.set(1, 0, 0.5);
  CHECK(threshold_components(s, ElasticNetPenalty(0.5, 1.0))
            .components.size() == 2);
  CHECK(threshold_components(s, ElasticNetPenalty(0.49, 1.0))
            .components.size() == 1);
}

TEST_CASE("alpha = 0 keeps the problem whole") {
  Eigen::VectorXd d(4);
  d << 1, 1, 1, 1;
  const ComponentPartition parts =
      threshold_components(SymMatrix::diagonal(d), ElasticNetPenalty(1.0, 0.0));
  CHECK(parts.components.size() == 1);
  CHECK(parts.sizes[0] == 4);
}

TEST_CASE("single component equals the plain solve") {
  const SyntheticProblem prob = generate_synthetic(10, 0.8, 4.0, 1.0, 4);
  const ElasticNetPenalty pen(0.05, 0.9);  // weak cut: one component
  REQUIRE(threshold_components(prob.s, pen).components.size() == 1);

  BlockSolver solver;
  solver.det.rel_tol = 1e-11;
  const SolveResult block = solve_blockwise(prob.s, pen, solver);
  const SolveResult plain = solve_deterministic(prob.s, pen, solver.det);
  CHECK(rel_frobenius(block.theta_hat, plain.theta_hat) <= 1e-12);
}

TEST_CASE("diagonal S solves blockwise to the entrywise closed form") {
  const ElasticNetPenalty pen(1.0, 0.9);
  Eigen::VectorXd sd(10);
  for (Index i = 0; i < 10; ++i) sd(i) = 0.5 + 0.5 * static_cast<double>(i);
  BlockSolver solver;
  solver.det.rel_tol = 1e-12;
  const SolveResult r =
      solve_blockwise(SymMatrix::diagonal(sd), pen, solver);
  for (Index i = 0; i < 10; ++i) {
    const double b = sd(i) + pen.lambda1;
    const double want =
        (-b + std::sqrt(b * b + 8.0 * pen.lambda2)) / (4.0 * pen.lambda2);
    CHECK(r.theta_hat(i, i) == doctest::Approx(want).epsilon(1e-8));
  }
  for (Index j = 0; j < 10; ++j) {
    for (Index i = j + 1; i < 10; ++i) {
      CHECK(r.theta_hat(i, j) == 0.0);
    }
  }
}

TEST_CASE("two decoupled blocks match the full solve") {
  // Two strongly coupled 20x20 blocks, cross-block entries below the cut.
  std::mt19937_64 rng(99);
  const SymMatrix a = precmat::testing::random_spd(20, rng, 0.5);
  const SymMatrix b = precmat::testing::random_spd(20, rng, 0.5);
  std::uniform_real_distribution<double> tiny(-1e-4, 1e-4);
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(40, 40);
  full.topLeftCorner(20, 20) = a.mat();
  full.bottomRightCorner(20, 20) = b.mat();
  for (Index i = 0; i < 20; ++i) {
    for (Index j = 20; j < 40; ++j) {
      const double v = tiny(rng);
      full(i, j) = v;
      full(j, i) = v;
    }
  }
  const SymMatrix s = SymMatrix::from_lower(full);
  const ElasticNetPenalty pen(0.02, 0.9);  // cut 0.018 >> 1e-4
  REQUIRE(threshold_components(s, pen).components.size() == 2);

  BlockSolver solver;
  solver.det.rel_tol = 1e-11;
  const SolveResult block = solve_blockwise(s, pen, solver);
  const SolveResult plain = solve_deterministic(s, pen, solver.det);
  CHECK(rel_frobenius(block.theta_hat, plain.theta_hat) <= 1e-8);

  // Assembled cross-block entries are exact zeros.
  double max_cross = 0.0;
  for (Index i = 0; i < 20; ++i) {
    for (Index j = 20; j < 40; ++j) {
      max_cross = std::max(max_cross, std::abs(block.theta_hat(i, j)));
    }
  }
  CHECK(max_cross == 0.0);
}

TEST_CASE("support components equal threshold components across lambdas") {
  std::mt19937_64 seeds(1);
  int checked = 0;
  for (int rep = 0; rep < 10; ++rep) {
    const SyntheticProblem prob =
        generate_synthetic(16, 0.25, 4.0, 1.0, 100 + rep);
    // Sweep lambda so component counts range from 1 toward p.
    for (double lam : {0.05, 0.2, 0.5, 1.0, 2.0}) {
      const ElasticNetPenalty pen(lam, 0.9);
      const ComponentPartition want = threshold_components(prob.s, pen);
      DetSolverConfig cfg;
      cfg.rel_tol = 1e-11;
      cfg.max_iters = 50000;
      const SolveResult r = solve_deterministic(prob.s, pen, cfg);
      REQUIRE(r.converged);
      const ComponentPartition got = support_components(r.theta_hat, 1e-8);
      CHECK(same_partition(want, got));
      ++checked;
    }
  }
  CHECK(checked == 50);
}

TEST_CASE("permutation invariance of the blockwise solve") {
  const SyntheticProblem prob = generate_synthetic(18, 0.2, 4.0, 1.0, 55);
  const ElasticNetPenalty pen(0.8, 0.9);

  BlockSolver solver;
  solver.det.rel_tol = 1e-12;
  const SolveResult base = solve_blockwise(prob.s, pen, solver);

  std::vector<Index> perm(18);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(2024);
  std::shuffle(perm.begin(), perm.end(), rng);

  SymMatrix permuted(18);
  for (Index j = 0; j < 18; ++j) {
    for (Index i = j; i < 18; ++i) {
      permuted.set(i, j, prob.s(perm[i], perm[j]));
    }
  }
  const SolveResult moved = solve_blockwise(permuted, pen, solver);
  double worst = 0.0;
  for (Index j = 0; j < 18; ++j) {
    for (Index i = 0; i < 18; ++i) {
      worst = std::max(worst, std::abs(moved.theta_hat(i, j) -
                                       base.theta_hat(perm[i], perm[j])));
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("blockwise extracts the reference per block") {
  const SyntheticProblem prob = generate_synthetic(12, 0.15, 4.0, 1.0, 31);
  const ElasticNetPenalty pen(1.0, 0.9);
  BlockSolver solver;
  solver.det.rel_tol = 1e-11;
  const SolveResult ref = solve_blockwise(prob.s, pen, solver);

  solver.det.reference = ref.theta_hat;
  const SolveResult tracked = solve_blockwise(prob.s, pen, solver);
  REQUIRE(!tracked.trace.empty());
  for (const auto& rec : tracked.trace) {
    if (rec.iter > 0) CHECK(std::isfinite(rec.rel_error));
  }
  CHECK(tracked.trace.back().rel_error <= 1e-6);
}

TEST_CASE("blockwise stochastic seeds derive per block") {
  const SyntheticProblem prob = generate_synthetic(12, 0.15, 4.0, 1.0, 31);
  const ElasticNetPenalty pen(1.0, 0.9);
  REQUIRE(threshold_components(prob.s, pen).components.size() > 1);

  BlockSolver solver;
  solver.kind = SolverKind::Stochastic;
  solver.stoch.seed = 17;
  solver.stoch.max_iters = 50;
  solver.stoch.rel_tol = 0.0;
  const SolveResult a = solve_blockwise(prob.s, pen, solver);
  const SolveResult b = solve_blockwise(prob.s, pen, solver);
  CHECK((a.theta_hat.mat() - b.theta_hat.mat()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_SUITE_END();
