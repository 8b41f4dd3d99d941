// Microbenchmarks for the kernels that dominate solve time: factorization,
// inversion, the prox map, Gaussian batch sampling, and one full iteration
// of each solver flavor.

#include <benchmark/benchmark.h>

#include <random>

#include "precmat/data_io.hpp"
#include "precmat/penalty.hpp"
#include "precmat/sampler.hpp"
#include "precmat/solver.hpp"

using namespace precmat;

namespace {

SymMatrix spd_instance(Index p, std::uint64_t seed) {
  const SyntheticProblem prob =
      generate_synthetic(p, 10.0 / static_cast<double>(p), 4.0, 1.0, seed);
  return prob.s;
}

}  // namespace

static void BM_Cholesky(benchmark::State& state) {
  const Index p = state.range(0);
  const SymMatrix s = spd_instance(p, 1);
  SymMatrix shifted = SymMatrix::from_lower(
      s.mat() + Eigen::MatrixXd::Identity(p, p));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cholesky(shifted));
  }
}
BENCHMARK(BM_Cholesky)->Arg(100)->Arg(250)->Arg(500);

static void BM_InvertViaFactor(benchmark::State& state) {
  const Index p = state.range(0);
  SymMatrix shifted = SymMatrix::from_lower(
      spd_instance(p, 1).mat() + Eigen::MatrixXd::Identity(p, p));
  const SpdFactor f = cholesky(shifted);
  for (auto _ : state) {
    benchmark::DoNotOptimize(invert_via_factor(f));
  }
}
BENCHMARK(BM_InvertViaFactor)->Arg(100)->Arg(250)->Arg(500);

static void BM_Prox(benchmark::State& state) {
  const Index p = state.range(0);
  const SymMatrix s = spd_instance(p, 2);
  const ElasticNetPenalty pen(0.5, 0.9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prox(s, 0.1, pen));
  }
}
BENCHMARK(BM_Prox)->Arg(250)->Arg(1000);

static void BM_SampleCov(benchmark::State& state) {
  const Index p = state.range(0);
  const Index n = state.range(1);
  SymMatrix shifted = SymMatrix::from_lower(
      spd_instance(p, 3).mat() + Eigen::MatrixXd::Identity(p, p));
  auto sampler = sampler_from_precision(shifted, 42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler.draw_sample_cov(n));
  }
}
BENCHMARK(BM_SampleCov)->Args({250, 100})->Args({250, 1000})->Args({1000, 500});

static void BM_DetIteration(benchmark::State& state) {
  const Index p = state.range(0);
  const SymMatrix s = spd_instance(p, 4);
  const ElasticNetPenalty pen(0.5, 0.9);
  const SymMatrix theta = default_start(s);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prox_grad_step(theta, s, pen, 0.01));
  }
}
BENCHMARK(BM_DetIteration)->Arg(100)->Arg(250)->Arg(500);

BENCHMARK_MAIN();
