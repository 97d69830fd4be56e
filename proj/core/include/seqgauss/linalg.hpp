#pragma once

// Truncated sequence-space linear algebra.
//
// H is represented by R^m through a fixed orthonormal basis and l2(R) by R^d, so an
// element f = (f_1, f_2, ...) of l2(H) becomes an m x d matrix whose k-th column is f_k.
// All identities below are exact at truncation because every operand has finite support.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "seqgauss/errors.hpp"

namespace seqgauss {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// An element of truncated H.
using HVec = Vector;

struct TruncationDims {
  int m = 1;  // dim H
  int d = 1;  // dim l2(R)

  TruncationDims() = default;
  TruncationDims(int m_, int d_);

  int flat_size() const { return m * d; }
  friend bool operator==(const TruncationDims&, const TruncationDims&) = default;
};

// f in l2(H), stored column-major by sequence index so that [f, x] is F * x.
class SeqVec {
 public:
  SeqVec() = default;
  explicit SeqVec(TruncationDims dims);
  explicit SeqVec(Matrix columns);

  static SeqVec zero(TruncationDims dims) { return SeqVec(dims); }
  // Element whose only non-zero entry is 1 at (row i, column k).
  static SeqVec unit(TruncationDims dims, int i, int k);

  TruncationDims dims() const { return {static_cast<int>(f_.rows()), static_cast<int>(f_.cols())}; }
  int m() const { return static_cast<int>(f_.rows()); }
  int d() const { return static_cast<int>(f_.cols()); }

  const Matrix& matrix() const { return f_; }
  HVec column(int k) const { return f_.col(k); }

  // Row-major copy of the entries (the serialization order).
  std::vector<double> flatten_row_major() const;

  double norm() const { return f_.norm(); }
  bool is_zero() const { return f_.isZero(0.0); }

  SeqVec& operator+=(const SeqVec& o);
  SeqVec& operator-=(const SeqVec& o);
  SeqVec& operator*=(double s);
  friend SeqVec operator+(SeqVec a, const SeqVec& b) { return a += b; }
  friend SeqVec operator-(SeqVec a, const SeqVec& b) { return a -= b; }
  friend SeqVec operator*(SeqVec a, double s) { return a *= s; }
  friend SeqVec operator*(double s, SeqVec a) { return a *= s; }
  SeqVec operator-() const { return SeqVec(Matrix(-f_)); }

 private:
  Matrix f_;
};

// Symmetric positive-definite covariance A on R^d together with its Cholesky factor.
class CovOp {
 public:
  static constexpr double kSymmetryTol = 1e-12;

  CovOp() = default;
  // Throws NotPositiveDefinite if A is not symmetric (relative 1e-12) or Cholesky fails.
  explicit CovOp(Matrix a);

  static CovOp identity(int d) { return CovOp(Matrix::Identity(d, d)); }

  int dim() const { return static_cast<int>(a_.rows()); }
  const Matrix& matrix() const { return a_; }
  const Matrix& chol() const { return l_; }

  Vector apply(const Vector& x) const;
  // (x, y)_A = (x, A y) on R^d.
  double inner(const Vector& x, const Vector& y) const;
  double norm(const Vector& x) const { return std::sqrt(inner(x, x)); }

 private:
  Matrix a_;
  Matrix l_;
};

// h . x: the k-th column is x_k h.
SeqVec bullet(const HVec& h, const Vector& x);

// [f, x] = sum_k x_k f_k.
HVec bracket(const SeqVec& f, const Vector& x);

// Frobenius inner product sum_k (f_k, g_k)_H.
double inner_l2(const SeqVec& f, const SeqVec& g);

// (f, g)_A = (f, A g)_{l2(H)} = trace(F^T G A).
double inner_A(const SeqVec& f, const SeqVec& g, const CovOp& a);
inline double norm_A(const SeqVec& f, const CovOp& a) { return std::sqrt(inner_A(f, f, a)); }

// The extension of A to l2(H): F * A.
SeqVec apply_extended(const CovOp& a, const SeqVec& f);
// Same, for any d x d matrix (used for the block projections).
SeqVec apply_extended(const Matrix& op, const SeqVec& f);

// Modified Gram-Schmidt with one re-orthogonalization pass under an arbitrary inner
// product. Inputs whose residual norm is at most tol * (input norm) are dropped.
template <class T, class Inner>
std::vector<T> orthonormalize(std::span<const T> xs, Inner&& inner, double tol) {
  std::vector<T> basis;
  for (const T& x : xs) {
    const double in_norm = std::sqrt(std::max(inner(x, x), 0.0));
    if (in_norm == 0.0) continue;
    T v = x;
    for (int pass = 0; pass < 2; ++pass) {
      for (const T& q : basis) v -= inner(v, q) * q;
    }
    const double res = std::sqrt(std::max(inner(v, v), 0.0));
    if (res <= tol * in_norm) continue;
    v *= 1.0 / res;
    basis.push_back(std::move(v));
  }
  return basis;
}

// A-orthonormal basis of span(xs), in input order, with near-dependent inputs dropped.
// Throws PreconditionError if xs is empty or every input is dropped.
std::vector<Vector> gram_schmidt_A(std::span<const Vector> xs, const CovOp& a, double tol = 1e-12);

// A-orthogonal projection onto span{e_1, ..., e_N} and its l2-adjoint:
//   P  = [[Id, A_CC^-1 A_CF], [0, 0]]
//   PT = [[Id, 0], [A_FC A_CC^-1, 0]]
// `cut` is N, counted 1-based as the number of leading coordinates kept.
struct ProjectionBlocks {
  int cut = 0;
  Matrix P;
  Matrix PT;
};

ProjectionBlocks block_projection(const CovOp& a, int cut);

// Positive semidefiniteness: smallest eigenvalue >= -tol * spectral norm.
// Throws PreconditionError if M is not square or not symmetric within tol (relative).
bool psd_check(const Matrix& m, double tol = 1e-9);

Matrix hadamard(const Matrix& a, const Matrix& b);

// Entrywise exponential summed as the Hadamard power series sum_k M^{(k)} / k!.
Matrix hadamard_exp(const Matrix& m);

}  // namespace seqgauss
