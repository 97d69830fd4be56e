#pragma once

// Finite chaos expansions F = sum_n :<f^(n), omega^{(x)n}>: and conditional expectations
// with respect to sigma-algebras generated by finitely many linear observables.
//
// Conditioning on <psi_1, .>, ..., <psi_q, .> with an A-orthonormal family acts on the
// kernels as the tensor power of the A-orthogonal projection
//   P phi = sum_k (phi, psi_k)_A psi_k,
// so a polarized term alpha phi^{(x)n} maps to alpha (P phi)^{(x)n}.

#include <map>
#include <span>
#include <vector>

#include "seqgauss/linalg.hpp"
#include "seqgauss/measure.hpp"
#include "seqgauss/wick.hpp"

namespace seqgauss {

class ChaosExpansion {
 public:
  explicit ChaosExpansion(TruncationDims dims) : dims_(dims) {}

  // Appends to the kernel of the same degree if one exists.
  ChaosExpansion& add(const SymKernel& k);

  TruncationDims dims() const { return dims_; }
  const std::map<int, SymKernel>& kernels() const { return kernels_; }
  const SymKernel* kernel(int degree) const;
  int max_degree() const { return kernels_.empty() ? -1 : kernels_.rbegin()->first; }

 private:
  TruncationDims dims_;
  std::map<int, SymKernel> kernels_;
};

class ConditioningSet {
 public:
  static constexpr double kOrthonormalTol = 1e-8;

  // Throws PreconditionError unless (psi_i, psi_j)_A = delta_ij within 1e-8.
  ConditioningSet(std::vector<SeqVec> basis, const CovOp& a);

  // A-orthonormalizes an arbitrary spanning family first (dropping dependent members).
  static ConditioningSet from_spanning(std::span<const SeqVec> xs, const CovOp& a, double tol = 1e-12);

  const std::vector<SeqVec>& basis() const { return basis_; }
  std::size_t size() const { return basis_.size(); }

  SeqVec project(const SeqVec& phi, const CovOp& a) const;
  // (<psi_1, W>, ..., <psi_q, W>).
  std::vector<double> coordinates(const SeqVec& w) const;

 private:
  std::vector<SeqVec> basis_;
};

double eval_expansion(const ChaosExpansion& e, const CovOp& a, const SeqVec& w);

// sum_n n! (E1[n], E2[n])_A, the L2(mu_A) inner product.
double chaos_inner(const ChaosExpansion& e1, const ChaosExpansion& e2, const CovOp& a);
double chaos_norm(const ChaosExpansion& e, const CovOp& a);

ChaosExpansion cond_exp_chaos(const ChaosExpansion& e, const ConditioningSet& c, const CovOp& a);

// Kernel of E[<f, .> | x_1, ..., x_n], where conditioning on x_k means on every
// observable <h . x_k, .> with h in H. The result is P f with P the A-orthogonal
// projection of l2(R) onto span(xs), extended to l2(H):
//   P f = sum_k [f, A xhat_k] . xhat_k over an A-orthonormal basis xhat of span(xs).
// Throws PreconditionError if every x is zero.
SeqVec cond_exp_monomial(const SeqVec& f, std::span<const Vector> xs, const CovOp& a);

// Polynomial in the conditioning coordinates, sum_t c_t prod_k y_k^{p_tk}.
class TestPolynomial {
 public:
  static constexpr int kMaxDegree = 6;

  struct Term {
    double coeff = 0.0;
    std::vector<int> powers;
  };

  TestPolynomial() = default;
  // Throws PreconditionError if the total degree exceeds 6 or a power is negative.
  explicit TestPolynomial(std::vector<Term> terms);

  static TestPolynomial one() { return TestPolynomial(std::vector<Term>{Term{1.0, {}}}); }

  int degree() const;
  double operator()(std::span<const double> y) const;
  const std::vector<Term>& terms() const { return terms_; }

 private:
  std::vector<Term> terms_;
};

// Monte Carlo estimate of E[(F - E[F|G]) g(<psi_1, .>, ...)], which must vanish.
McEstimate mc_cond_check(const ChaosExpansion& e, const ConditioningSet& c, const TestPolynomial& g,
                         const SampleBatch& batch, const CovOp& a);

}  // namespace seqgauss
