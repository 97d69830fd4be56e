#pragma once

// Sampling of the truncated Gaussian measure mu_A and Monte Carlo estimators.
//
// A sample is W = Z L^T with Z an m x d matrix of independent standard normals and
// A = L L^T, so that Cov(<phi, W>, <psi, W>) = (phi, psi)_A.
//
// Sampling is split into fixed-size chunks; chunk c draws from its own engine seeded
// with seed + c. A batch is therefore a pure function of (A, m, count, seed) and does
// not depend on how many threads produced it.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "seqgauss/linalg.hpp"

namespace seqgauss {

inline constexpr std::size_t kSampleChunk = 4096;

struct SampleBatch {
  std::vector<SeqVec> samples;
  std::uint64_t seed = 0;
  std::size_t count = 0;
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;

  // |value - expected| <= k standard errors.
  bool within(double expected, double k = 4.0) const;
};

struct ComplexMcEstimate {
  McEstimate real;
  McEstimate imag;

  std::complex<double> value() const { return {real.value, imag.value}; }
};

// threads = 0 uses std::thread::hardware_concurrency(). Throws PreconditionError if count <= 0.
SampleBatch sample_mu_A(const CovOp& a, int m, long long count, std::uint64_t seed, unsigned threads = 1);

// <phi, W> = (phi, W)_{l2(H)}.
double pairing(const SeqVec& phi, const SeqVec& w);

// Sample mean and standard error of f over the batch.
McEstimate mc_mean(const SampleBatch& batch, const std::function<double(const SeqVec&)>& f);

// Mean of exp(i <phi, W>) with componentwise standard errors.
ComplexMcEstimate char_function_mc(const SeqVec& phi, const SampleBatch& batch);

// Exact E[prod_i <phi_i, omega>] under mu_A: sum over perfect matchings of the
// products of pairwise covariances (phi_i, phi_j)_A; zero for odd length.
// Throws PreconditionError for more than 10 factors.
double isserlis_moment(std::span<const SeqVec> phis, const CovOp& a);
inline constexpr std::size_t kMaxIsserlisFactors = 10;

struct ComponentStats {
  McEstimate mean;
  McEstimate variance;
  bool ok = true;
};

struct PairStats {
  int i = 0;
  int j = 0;
  McEstimate covariance;
  // E[X_i^2 X_j^2], which factorizes to 1 for independent standard normals.
  McEstimate square_product;
  bool ok = true;
};

struct PushforwardReport {
  std::vector<ComponentStats> components;
  std::vector<PairStats> pairs;
  double sigmas = 4.0;

  bool ok() const;
};

// Empirical check that (<phi_1, W>, ..., <phi_q, W>) is standard normal on R^q for an
// A-orthonormal family. Throws PreconditionError if the family is not orthonormal
// within 1e-8.
PushforwardReport pushforward_check(std::span<const SeqVec> phis, const CovOp& a, const SampleBatch& batch,
                                    double sigmas = 4.0);

// One row per sample, entries flattened row-major, with a header row.
void write_batch_csv(std::ostream& os, const SampleBatch& batch);

}  // namespace seqgauss
