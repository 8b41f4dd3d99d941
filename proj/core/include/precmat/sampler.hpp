#pragma once

#include <cstdint>
#include <random>

#include "precmat/sym_matrix.hpp"

namespace precmat {

/// splitmix64 step; used to derive independent sub-seeds from one seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Deterministic stream of standard normal variates: mt19937_64 driving the
/// Box-Muller transform, with uniforms built as ((x >> 11) + 1) * 2^-53 so
/// log() never sees zero. Bit-reproducible for a fixed seed on a given
/// platform; cross-platform bit-exactness is not guaranteed (libm).
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : eng_(seed) {}

  double uniform01() {
    return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
  }

  double next();

  /// Fills column by column, consuming dim()*cols variates in order.
  void fill(Eigen::Ref<Eigen::MatrixXd> out);

 private:
  std::mt19937_64 eng_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Monte Carlo estimate of theta^{-1}: the average of n outer products of
/// draws from N(0, theta^{-1}).
struct SampleCovariance {
  SymMatrix matrix;
  Index n_samples = 0;
};

/// Draws from N(0, theta^{-1}) by back-substitution against the Cholesky
/// factor of theta: z solves L^T z = u with u ~ N(0, I). Holds mutable RNG
/// state, so a sampler needs exclusive access while drawing; samplers with
/// distinct seeds may run concurrently.
class GaussianSampler {
 public:
  GaussianSampler(SpdFactor factor, std::uint64_t seed)
      : factor_(std::move(factor)), normals_(seed) {}

  Index dim() const { return factor_.dim(); }
  const SpdFactor& factor() const { return factor_; }

  /// Re-factorizes for a new precision matrix while keeping the RNG state,
  /// so draws across solver iterations come from one continuing stream.
  /// Throws NotPositiveDefinite, which doubles as the solvers' restart test.
  void set_precision(const SymMatrix& theta);

  Eigen::VectorXd draw();

  /// Average of n outer products, accumulated with blocked symmetric
  /// rank-k updates. Advances the RNG state.
  SampleCovariance draw_sample_cov(Index n);

 private:
  SpdFactor factor_;
  NormalStream normals_;
};

GaussianSampler sampler_from_precision(const SymMatrix& theta,
                                       std::uint64_t seed);

}  // namespace precmat
