#include "precmat/sampler.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace precmat {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + (stream + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double NormalStream::next() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(angle);
  has_cached_ = true;
  return r * std::cos(angle);
}

void NormalStream::fill(Eigen::Ref<Eigen::MatrixXd> out) {
  for (Index j = 0; j < out.cols(); ++j) {
    for (Index i = 0; i < out.rows(); ++i) {
      out(i, j) = next();
    }
  }
}

void GaussianSampler::set_precision(const SymMatrix& theta) {
  factor_ = cholesky(theta);
}

Eigen::VectorXd GaussianSampler::draw() {
  Eigen::VectorXd u(dim());
  for (Index i = 0; i < u.size(); ++i) u(i) = normals_.next();
  factor_.lower.transpose().triangularView<Eigen::Upper>().solveInPlace(u);
  return u;
}

SampleCovariance GaussianSampler::draw_sample_cov(Index n) {
  if (n < 1) {
    throw std::invalid_argument("draw_sample_cov: need n >= 1");
  }
  const Index p = dim();
  constexpr Index kBlock = 256;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd z(p, kBlock);
  Index done = 0;
  while (done < n) {
    const Index m = std::min(kBlock, n - done);
    auto block = z.leftCols(m);
    normals_.fill(block);
    factor_.lower.transpose().triangularView<Eigen::Upper>().solveInPlace(
        block);
    acc.selfadjointView<Eigen::Lower>().rankUpdate(block, 1.0);
    done += m;
  }
  acc /= static_cast<double>(n);
  SampleCovariance cov;
  cov.matrix = SymMatrix::from_lower(acc);
  cov.n_samples = n;
  return cov;
}

GaussianSampler sampler_from_precision(const SymMatrix& theta,
                                       std::uint64_t seed) {
  return GaussianSampler(cholesky(theta), seed);
}

}  // namespace precmat
