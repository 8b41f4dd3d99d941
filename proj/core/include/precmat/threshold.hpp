#pragma once

#include <utility>
#include <vector>

#include "precmat/penalty.hpp"
#include "precmat/solver.hpp"
#include "precmat/sym_matrix.hpp"

namespace precmat {

/// Graph on {0..p-1} with an edge wherever |s_ij| > alpha*lambda (strict),
/// i != j. Stored as an edge list; no dense boolean matrix.
struct ThresholdGraph {
  Index dim = 0;
  std::vector<std::pair<Index, Index>> edges;  // i < j
};

ThresholdGraph threshold_graph(const SymMatrix& s,
                               const ElasticNetPenalty& pen);

/// Disjoint node groups covering {0..p-1}; no thresholded edge crosses two
/// groups. Components are ordered by smallest member, indices ascending.
struct ComponentPartition {
  std::vector<std::vector<Index>> components;
  std::vector<Index> sizes;
};

/// Connected components of the thresholded graph via union-find. alpha == 0
/// thresholds nothing away, so the whole index set is one component.
ComponentPartition threshold_components(const SymMatrix& s,
                                        const ElasticNetPenalty& pen);

enum class SolverKind { Deterministic, Stochastic, Averaged };

/// Solver choice plus its configuration for blockwise solving; only the
/// config matching `kind` is read.
struct BlockSolver {
  SolverKind kind = SolverKind::Deterministic;
  DetSolverConfig det;
  StochConfig stoch;
};

/// Splits the problem along threshold_components, solves each principal
/// submatrix independently (in parallel, capped by PRECMAT_THREADS), and
/// assembles the full solution with exact zeros between blocks. Stochastic
/// blocks get seed XOR block-index so results do not depend on scheduling.
/// The returned trace is the per-block traces concatenated with iter and
/// elapsed_s remapped to stay monotone; kkt_residual and converged refer to
/// the assembled full problem.
SolveResult solve_blockwise(const SymMatrix& s, const ElasticNetPenalty& pen,
                            const BlockSolver& solver);

/// Components of the support graph of theta (entries with |theta_ij| > tol);
/// used to compare a solution's sparsity structure against
/// threshold_components.
ComponentPartition support_components(const SymMatrix& theta, double tol);

}  // namespace precmat
