#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "seqgauss/chaos.hpp"
#include "seqgauss/closure.hpp"
#include "seqgauss/measure.hpp"
#include "seqgauss/wick.hpp"

namespace {

using namespace seqgauss;

CovOp random_covariance(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix b(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) b(i, k) = n(rng);
  return CovOp(Matrix(b * b.transpose() + d * Matrix::Identity(d, d)));
}

SeqVec random_seqvec(int m, int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix f(m, d);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < d; ++k) f(i, k) = n(rng);
  return SeqVec(std::move(f));
}

void BM_SampleMuA(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const int d = static_cast<int>(state.range(0));
  const CovOp a = random_covariance(d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(sample_mu_A(a, 2, 10000, 1, 1));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_SampleMuA)->Arg(4)->Arg(16)->Arg(64);

void BM_WickEvalPolarized(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const int n = static_cast<int>(state.range(0));
  const CovOp a = random_covariance(8, rng);
  std::vector<SeqVec> xs;
  for (int i = 0; i < n; ++i) xs.push_back(random_seqvec(2, 8, rng));
  const SymKernel k = polarize(xs);
  const SeqVec w = random_seqvec(2, 8, rng);
  for (auto _ : state) benchmark::DoNotOptimize(wick_eval(k, a, w));
}
BENCHMARK(BM_WickEvalPolarized)->DenseRange(1, 6);

void BM_WickFunctionalDense(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const int n = static_cast<int>(state.range(0));
  const CovOp a = random_covariance(3, rng);
  const SeqVec w = random_seqvec(2, 3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(wick_functional_dense(n, a, w));
}
BENCHMARK(BM_WickFunctionalDense)->DenseRange(1, 4);

void BM_Isserlis(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const CovOp a = random_covariance(6, rng);
  std::vector<SeqVec> phis;
  for (int i = 0; i < state.range(0); ++i) phis.push_back(random_seqvec(2, 6, rng));
  for (auto _ : state) benchmark::DoNotOptimize(isserlis_moment(phis, a));
}
BENCHMARK(BM_Isserlis)->DenseRange(2, 10, 2);

void BM_CondExpMonomial(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const int d = static_cast<int>(state.range(0));
  const CovOp a = random_covariance(d, rng);
  const SeqVec f = random_seqvec(3, d, rng);
  std::vector<Vector> xs;
  for (int i = 0; i < d / 2; ++i) xs.push_back(Vector::Unit(d, i));
  for (auto _ : state) benchmark::DoNotOptimize(cond_exp_monomial(f, xs, a));
}
BENCHMARK(BM_CondExpMonomial)->Arg(8)->Arg(32);

void BM_ClosureStep(benchmark::State& state) {
  const int cells = static_cast<int>(state.range(0));
  const int order = static_cast<int>(state.range(1));
  const MaterialParams params = MaterialParams::uniform(UniformGrid{-1.0, 1.0, cells}, 1.0, 0.5, 0.2);
  const ClosedSystem sys = close_system(order, ClosureSpec::pn());
  MomentGrid g;
  g.values = Matrix::Constant(cells, order + 1, 1.0);
  const double dt = max_stable_dt(sys, params.grid);
  for (auto _ : state) benchmark::DoNotOptimize(step(g, sys, params, dt, kDefaultCfl));
  state.SetItemsProcessed(state.iterations() * cells);
}
BENCHMARK(BM_ClosureStep)->Args({200, 3})->Args({200, 9})->Args({2000, 9});

}  // namespace

BENCHMARK_MAIN();
