#include "seqgauss/measure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <string>
#include <thread>

namespace seqgauss {

namespace {

void fill_chunk(const Matrix& lt, int m, int d, std::uint64_t seed, std::span<SeqVec> out) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(m, d);
  for (SeqVec& w : out) {
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < m; ++i) z(i, k) = normal(engine);
    w = SeqVec(Matrix(z * lt));
  }
}

// Mean and standard error of the mean from a sample of values.
McEstimate summarize(std::span<const double> v) {
  McEstimate e;
  e.count = v.size();
  if (v.empty()) return e;
  long double sum = 0.0L;
  for (double x : v) sum += x;
  const double mean = static_cast<double>(sum / v.size());
  long double ss = 0.0L;
  for (double x : v) ss += static_cast<long double>(x - mean) * (x - mean);
  e.value = mean;
  e.std_error = v.size() > 1 ? std::sqrt(static_cast<double>(ss / (v.size() - 1)) / v.size()) : 0.0;
  return e;
}

// Sum over perfect matchings of the index set `mask`, pairing its lowest index first.
double matching_sum(const Matrix& cov, unsigned mask) {
  if (mask == 0) return 1.0;
  const int first = std::countr_zero(mask);
  const unsigned rest = mask & (mask - 1);
  double s = 0.0;
  for (unsigned r = rest; r != 0; r &= r - 1) {
    const int partner = std::countr_zero(r);
    const double c = cov(first, partner);
    if (c != 0.0) s += c * matching_sum(cov, rest & ~(1u << partner));
  }
  return s;
}

}  // namespace

bool McEstimate::within(double expected, double k) const {
  return std::fabs(value - expected) <= k * std_error;
}

SampleBatch sample_mu_A(const CovOp& a, int m, long long count, std::uint64_t seed, unsigned threads) {
  if (count <= 0) throw PreconditionError("sample_mu_A: count must be positive");
  if (m < 1) throw DimensionError("sample_mu_A: m must be positive");
  const int d = a.dim();
  const Matrix lt = a.chol().transpose();

  SampleBatch batch;
  batch.seed = seed;
  batch.count = static_cast<std::size_t>(count);
  batch.samples.resize(batch.count);

  const std::size_t chunks = (batch.count + kSampleChunk - 1) / kSampleChunk;
  auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = c * kSampleChunk;
    const std::size_t len = std::min(kSampleChunk, batch.count - begin);
    fill_chunk(lt, m, d, seed + c, std::span<SeqVec>(batch.samples).subspan(begin, len));
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, chunks));
  if (threads <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t c = t; c < chunks; c += threads) run_chunk(c);
      });
    }
  }
  return batch;
}

double pairing(const SeqVec& phi, const SeqVec& w) { return inner_l2(phi, w); }

McEstimate mc_mean(const SampleBatch& batch, const std::function<double(const SeqVec&)>& f) {
  if (batch.samples.empty()) throw PreconditionError("mc_mean: empty batch");
  std::vector<double> v;
  v.reserve(batch.samples.size());
  for (const auto& w : batch.samples) v.push_back(f(w));
  return summarize(v);
}

ComplexMcEstimate char_function_mc(const SeqVec& phi, const SampleBatch& batch) {
  if (batch.samples.empty()) throw PreconditionError("char_function_mc: empty batch");
  std::vector<double> re, im;
  re.reserve(batch.samples.size());
  im.reserve(batch.samples.size());
  for (const auto& w : batch.samples) {
    const double p = pairing(phi, w);
    re.push_back(std::cos(p));
    im.push_back(std::sin(p));
  }
  return {summarize(re), summarize(im)};
}

double isserlis_moment(std::span<const SeqVec> phis, const CovOp& a) {
  if (phis.size() > kMaxIsserlisFactors) {
    throw PreconditionError("isserlis_moment: at most 10 factors supported, got " + std::to_string(phis.size()));
  }
  const int n = static_cast<int>(phis.size());
  if (n % 2 == 1) return 0.0;
  Matrix cov(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) cov(i, j) = cov(j, i) = inner_A(phis[i], phis[j], a);
  return matching_sum(cov, (1u << n) - 1u);
}

bool PushforwardReport::ok() const {
  return std::all_of(components.begin(), components.end(), [](const auto& c) { return c.ok; }) &&
         std::all_of(pairs.begin(), pairs.end(), [](const auto& p) { return p.ok; });
}

PushforwardReport pushforward_check(std::span<const SeqVec> phis, const CovOp& a, const SampleBatch& batch,
                                    double sigmas) {
  if (batch.samples.empty()) throw PreconditionError("pushforward_check: empty batch");
  const int q = static_cast<int>(phis.size());
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      const double g = inner_A(phis[i], phis[j], a);
      if (std::fabs(g - (i == j ? 1.0 : 0.0)) > 1e-8) {
        throw PreconditionError("pushforward_check: family is not A-orthonormal");
      }
    }

  const std::size_t n = batch.samples.size();
  std::vector<std::vector<double>> x(static_cast<std::size_t>(q), std::vector<double>(n));
  for (std::size_t s = 0; s < n; ++s)
    for (int i = 0; i < q; ++i) x[i][s] = pairing(phis[i], batch.samples[s]);

  PushforwardReport rep;
  rep.sigmas = sigmas;
  std::vector<double> tmp(n);
  for (int i = 0; i < q; ++i) {
    ComponentStats c;
    c.mean = summarize(x[i]);
    // Unbiased for known mean 0: E[X^2] = 1.
    for (std::size_t s = 0; s < n; ++s) tmp[s] = x[i][s] * x[i][s];
    c.variance = summarize(tmp);
    c.ok = c.mean.within(0.0, sigmas) && c.variance.within(1.0, sigmas);
    rep.components.push_back(c);
  }
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j) {
      PairStats p;
      p.i = i;
      p.j = j;
      for (std::size_t s = 0; s < n; ++s) tmp[s] = x[i][s] * x[j][s];
      p.covariance = summarize(tmp);
      for (std::size_t s = 0; s < n; ++s) tmp[s] = x[i][s] * x[i][s] * x[j][s] * x[j][s];
      p.square_product = summarize(tmp);
      p.ok = p.covariance.within(0.0, sigmas) && p.square_product.within(1.0, sigmas);
      rep.pairs.push_back(p);
    }
  return rep;
}

void write_batch_csv(std::ostream& os, const SampleBatch& batch) {
  if (batch.samples.empty()) return;
  const int m = batch.samples.front().m();
  const int d = batch.samples.front().d();
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < d; ++k) os << (i == 0 && k == 0 ? "" : ",") << "w_" << i << "_" << k;
  os << '\n';
  os << std::setprecision(17);
  for (const auto& w : batch.samples) {
    const auto flat = w.flatten_row_major();
    for (std::size_t i = 0; i < flat.size(); ++i) os << (i ? "," : "") << flat[i];
    os << '\n';
  }
}

}  // namespace seqgauss
