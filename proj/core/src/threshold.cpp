#include "precmat/threshold.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numeric>
#include <string>
#include <thread>

namespace precmat {

namespace {

class UnionFind {
 public:
  explicit UnionFind(Index n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), Index{0});
  }

  Index find(Index x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(Index x, Index y) {
    Index px = find(x);
    Index py = find(y);
    if (px == py) return;
    if (rank_[px] < rank_[py]) std::swap(px, py);
    parent_[py] = px;
    if (rank_[px] == rank_[py]) ++rank_[px];
  }

 private:
  std::vector<Index> parent_;
  std::vector<Index> rank_;
};

ComponentPartition partition_from(UnionFind& uf, Index p) {
  std::vector<std::vector<Index>> groups(p);
  for (Index i = 0; i < p; ++i) {
    groups[uf.find(i)].push_back(i);
  }
  ComponentPartition out;
  for (auto& g : groups) {
    if (g.empty()) continue;
    out.components.push_back(std::move(g));  // already ascending; roots seen
  }                                          // in order of smallest member
  std::sort(out.components.begin(), out.components.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  out.sizes.reserve(out.components.size());
  for (const auto& c : out.components) {
    out.sizes.push_back(static_cast<Index>(c.size()));
  }
  return out;
}

long thread_cap() {
  if (const char* env = std::getenv("PRECMAT_THREADS")) {
    const long n = std::atol(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<long>(hw) : 1;
}

SymMatrix principal_submatrix(const SymMatrix& a,
                              const std::vector<Index>& idx) {
  const Index m = static_cast<Index>(idx.size());
  Eigen::MatrixXd block(m, m);
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < m; ++i) {
      block(i, j) = a(idx[i], idx[j]);
    }
  }
  return SymMatrix::from_lower(block);
}

[[noreturn]] void rethrow_with_block(std::exception_ptr ep, std::size_t block) {
  const std::string tag = "block " + std::to_string(block) + ": ";
  try {
    std::rethrow_exception(ep);
  } catch (const MaxRestartsExceeded& e) {
    throw MaxRestartsExceeded(tag + e.what());
  } catch (const NonFiniteObjective& e) {
    throw NonFiniteObjective(tag + e.what());
  } catch (const NotPositiveDefinite& e) {
    throw NotPositiveDefinite(tag + e.what());
  } catch (const Error& e) {
    throw Error(tag + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(tag + e.what());
  }
}

}  // namespace

ThresholdGraph threshold_graph(const SymMatrix& s,
                               const ElasticNetPenalty& pen) {
  const Index p = s.dim();
  const double cut = pen.alpha * pen.lambda;
  ThresholdGraph g{p, {}};
  for (Index j = 0; j < p; ++j) {
    for (Index i = j + 1; i < p; ++i) {
      if (std::abs(s(i, j)) > cut) g.edges.emplace_back(j, i);
    }
  }
  return g;
}

ComponentPartition threshold_components(const SymMatrix& s,
                                        const ElasticNetPenalty& pen) {
  const Index p = s.dim();
  UnionFind uf(p);
  if (pen.alpha == 0.0) {
    // No l1 term: nothing is thresholded away and the problem stays whole.
    for (Index i = 1; i < p; ++i) uf.unite(0, i);
  } else {
    const double cut = pen.alpha * pen.lambda;
    for (Index j = 0; j < p; ++j) {
      for (Index i = j + 1; i < p; ++i) {
        if (std::abs(s(i, j)) > cut) uf.unite(i, j);
      }
    }
  }
  return partition_from(uf, p);
}

ComponentPartition support_components(const SymMatrix& theta, double tol) {
  const Index p = theta.dim();
  UnionFind uf(p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = j + 1; i < p; ++i) {
      if (std::abs(theta(i, j)) > tol) uf.unite(i, j);
    }
  }
  return partition_from(uf, p);
}

SolveResult solve_blockwise(const SymMatrix& s, const ElasticNetPenalty& pen,
                            const BlockSolver& solver) {
  const Index p = s.dim();
  const ComponentPartition parts = threshold_components(s, pen);
  const std::size_t n_blocks = parts.components.size();

  std::vector<SolveResult> block_results(n_blocks);
  std::vector<std::exception_ptr> block_errors(n_blocks);

  auto solve_block = [&](std::size_t b) {
    const auto& idx = parts.components[b];
    const SymMatrix sub = principal_submatrix(s, idx);
    if (solver.kind == SolverKind::Deterministic) {
      DetSolverConfig cfg = solver.det;
      if (cfg.theta0) cfg.theta0 = principal_submatrix(*cfg.theta0, idx);
      if (cfg.reference) {
        cfg.reference = principal_submatrix(*cfg.reference, idx);
      }
      block_results[b] = solve_deterministic(sub, pen, cfg);
    } else {
      StochConfig cfg = solver.stoch;
      cfg.seed = solver.stoch.seed ^ static_cast<std::uint64_t>(b);
      if (cfg.theta0) cfg.theta0 = principal_submatrix(*cfg.theta0, idx);
      if (cfg.sigma0) cfg.sigma0 = principal_submatrix(*cfg.sigma0, idx);
      if (cfg.reference) {
        cfg.reference = principal_submatrix(*cfg.reference, idx);
      }
      block_results[b] = solver.kind == SolverKind::Stochastic
                             ? solve_stochastic(sub, pen, cfg)
                             : solve_averaged(sub, pen, cfg);
    }
  };

  const long workers = std::min<long>(thread_cap(), static_cast<long>(n_blocks));
  if (workers <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) {
      try {
        solve_block(b);
      } catch (...) {
        rethrow_with_block(std::current_exception(), b);
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (long w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t b = next.fetch_add(1); b < n_blocks;
             b = next.fetch_add(1)) {
          try {
            solve_block(b);
          } catch (...) {
            block_errors[b] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (std::size_t b = 0; b < n_blocks; ++b) {
      if (block_errors[b]) rethrow_with_block(block_errors[b], b);
    }
  }

  SolveResult out;
  out.theta_hat = SymMatrix(p);
  out.converged = true;
  double elapsed_offset = 0.0;
  long iter_offset = 0;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    const auto& idx = parts.components[b];
    const auto& r = block_results[b];
    for (std::size_t j = 0; j < idx.size(); ++j) {
      for (std::size_t i = j; i < idx.size(); ++i) {
        out.theta_hat.set(idx[i], idx[j],
                          r.theta_hat(static_cast<Index>(i),
                                      static_cast<Index>(j)));
      }
    }
    out.iterations = std::max(out.iterations, r.iterations);
    out.restarts += r.restarts;
    out.converged = out.converged && r.converged;
    double block_elapsed = 0.0;
    for (const auto& rec : r.trace) {
      TraceRecord moved = rec;
      moved.iter += iter_offset;
      moved.elapsed_s += elapsed_offset;
      block_elapsed = std::max(block_elapsed, rec.elapsed_s);
      out.trace.push_back(moved);
    }
    if (!r.trace.empty()) {
      iter_offset += r.trace.back().iter + 1;
    }
    elapsed_offset += block_elapsed;
  }
  out.kkt_residual = kkt_residual(out.theta_hat, s, pen);
  return out;
}

}  // namespace precmat
