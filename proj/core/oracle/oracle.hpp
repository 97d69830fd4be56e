#pragma once

// Reference computations that share no code path with the library routines they check:
// closed-form sums instead of recurrences, dense tensors instead of polarized kernels,
// pair-partition enumeration instead of sampling. Also random-instance generators.

#include <cstdint>
#include <functional>
#include <random>

#include "seqgauss/linalg.hpp"
#include "seqgauss/wick.hpp"

namespace seqgauss::oracle {

double factorial(int n);
double binomial(int n, int k);

// H_n(x) = sum_k (-1)^k n! / (2^k k! (n-2k)!) x^{n-2k}.
double hermite_prob_sum(int n, double x);
// Hh_n(x) = sum_k (-1)^k n! / (k! (n-2k)!) (2x)^{n-2k}.
double hermite_phys_sum(int n, double x);
// Sums of the absolute values of the same terms: the natural scale for relative errors,
// since the signed sums cancel near roots.
double hermite_prob_abs_sum(int n, double x);
double hermite_phys_abs_sum(int n, double x);

// <t, sum_k (-1)^k n! / (2^k k! (n-2k)!) tau_A^{(x)^k} (x)^ W^{(x)(n-2k)}>, built densely.
double wick_closed_form_dense(int n, const CovOp& a, const SeqVec& w, const DenseTensor& t);

// <phi, W>^n rebuilt from Wick polynomials:
//   sum_k n! / (2^k k! (n-2k)!) ||phi||_A^{2k} :<phi^{(x)(n-2k)}, W>:
double monomial_via_wick(const SeqVec& phi, int n, const CovOp& a, const SeqVec& w);

// Same identity evaluated densely: pairs phi^{(x)n} with
//   sum_k n! / (2^k k! (n-2k)!) tau_A^{(x)^k} (x)^ :W^{(x)(n-2k)}:.
double monomial_via_wick_dense(const SeqVec& phi, int n, const CovOp& a, const SeqVec& w);

// A-weighted contraction sum t_I s_J prod_k G(i_k, j_k) with G = A (x) Id_m on flat indices.
double dense_inner_A(const DenseTensor& t, const DenseTensor& s, const CovOp& a);

// Maximum deviation of t from each of its slot permutations.
double max_asymmetry(const DenseTensor& t);

// E[:phi^{(x)n}: :psi^{(x)m}:] by expanding both factors into monomials and applying the
// pair-partition formula. Requires n + m <= 10.
double wick_product_expectation(const SeqVec& phi, int n, const SeqVec& psi, int m, const CovOp& a);

// Largest |eigenvalue| of a self-adjoint linear map by power iteration on `start`.
double power_iteration(const std::function<Matrix(const Matrix&)>& op, Matrix start, int iters = 2000,
                       double tol = 1e-15);

// Random instances.
class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi);
  int uniform_int(int lo, int hi);
  double normal();
  Vector vector(int n);
  Matrix matrix(int rows, int cols);
  SeqVec seqvec(TruncationDims dims);
  // G G^T / n + shift * Id, well conditioned.
  Matrix spd(int n, double shift = 0.5);
  CovOp covariance(int n) { return CovOp(spd(n)); }
  // n x n Gram matrix of n random vectors in R^dim (positive semidefinite).
  Matrix gram(int n, int dim);

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace seqgauss::oracle
