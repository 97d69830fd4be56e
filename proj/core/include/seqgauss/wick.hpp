#pragma once

// Symmetric tensor kernels and Wick polynomials :<phi^(n), omega^(n)>: under mu_A.
//
// Kernels are kept polarized: a degree-n symmetric tensor is a weighted sum of n-th
// tensor powers, so every Wick evaluation reduces to scalar Hermite calls,
//   :<phi^{(x)n}, W^{(x)n}>: = ||phi||_A^n H_n(<phi, W> / ||phi||_A).
// DenseTensor is a small brute-force representation used to cross-check that path.

#include <cstddef>
#include <span>
#include <vector>

#include "seqgauss/linalg.hpp"

namespace seqgauss {

struct RankOnePower {
  double coeff = 0.0;
  SeqVec base;
  int degree = 0;
};

// sum_i coeff_i * base_i^{(x) degree}; always symmetric by construction.
class SymKernel {
 public:
  SymKernel(int degree, TruncationDims dims);

  // Degree-0 kernel (a real constant).
  static SymKernel constant(double c, TruncationDims dims);
  // coeff * phi^{(x)n}.
  static SymKernel power(const SeqVec& phi, int n, double coeff = 1.0);

  void add_term(double coeff, SeqVec base);

  int degree() const { return degree_; }
  TruncationDims dims() const { return dims_; }
  const std::vector<RankOnePower>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  SymKernel& operator+=(const SymKernel& o);
  SymKernel& operator*=(double s);

 private:
  int degree_;
  TruncationDims dims_;
  std::vector<RankOnePower> terms_;
};

// x_1 (x)^ ... (x)^ x_n via the polarization identity
//   (1 / (2^n n!)) sum_{B in {+-1}^n} B_1...B_n (B_1 x_1 + ... + B_n x_n)^{(x)n}.
// Returns 2^n rank-one terms. Throws PreconditionError on empty input.
SymKernel polarize(std::span<const SeqVec> xs);

// Dense degree-n tensor over the flattened index set of m x d SeqVecs.
// Flat SeqVec index of entry (row i, column k) is k * m + i; the first tensor slot is
// the most significant digit of the multi-index.
class DenseTensor {
 public:
  static constexpr int kMaxDegree = 4;
  static constexpr int kMaxFlat = 6;

  // Throws PreconditionError if degree > 4 or m * d > 6.
  DenseTensor(int degree, TruncationDims dims);

  static DenseTensor scalar(double c, TruncationDims dims);
  static DenseTensor from_seqvec(const SeqVec& v);
  static DenseTensor from_kernel(const SymKernel& k);
  // tau_A as a degree-2 tensor: entry ((i,k),(j,l)) = delta_ij A_kl.
  static DenseTensor tau(const CovOp& a, TruncationDims dims);

  int degree() const { return degree_; }
  TruncationDims dims() const { return dims_; }
  int side() const { return dims_.flat_size(); }
  std::size_t size() const { return data_.size(); }

  double& operator[](std::size_t flat) { return data_[flat]; }
  double operator[](std::size_t flat) const { return data_[flat]; }
  double at(std::span<const int> multi) const;
  std::vector<int> multi_index(std::size_t flat) const;
  std::size_t flat_index(std::span<const int> multi) const;

  const std::vector<double>& data() const { return data_; }

  DenseTensor& operator+=(const DenseTensor& o);
  DenseTensor& operator-=(const DenseTensor& o);
  DenseTensor& operator*=(double s);

 private:
  int degree_;
  TruncationDims dims_;
  std::vector<double> data_;
};

DenseTensor outer(const DenseTensor& a, const DenseTensor& b);

// Plain Euclidean contraction sum_I a_I b_I of equal-degree tensors.
double contract(const DenseTensor& a, const DenseTensor& b);

// Average over all n! slot permutations.
DenseTensor symmetrize_dense(const DenseTensor& t);

// :<k, W^{(x)n}>: summed over the polarized terms; zero-norm bases contribute 0 for n >= 1.
double wick_eval(const SymKernel& k, const CovOp& a, const SeqVec& w);

// :W^{(x)n}: built densely by the two-term recursion
//   :W^0: = 1, :W^1: = W, :W^n: = W (x)^ :W^{n-1}: - (n-1) tau_A (x)^ :W^{n-2}:
DenseTensor wick_functional_dense(int n, const CovOp& a, const SeqVec& w);

// <t, :W^{(x)n}:> with the functional from wick_functional_dense.
double wick_eval_dense(int n, const CovOp& a, const SeqVec& w, const DenseTensor& t);

// sum_ij alpha_i beta_j (phi_i, psi_j)_A^n.
double kernel_inner_A(const SymKernel& k1, const SymKernel& k2, const CovOp& a);

}  // namespace seqgauss
