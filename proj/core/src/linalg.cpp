#include "seqgauss/linalg.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace seqgauss {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw PreconditionError(std::string(what) + ": non-finite entry");
}

void require_same(TruncationDims a, TruncationDims b, const char* op) {
  if (!(a == b)) {
    throw DimensionError(std::string(op) + ": dimensions " + std::to_string(a.m) + "x" +
                         std::to_string(a.d) + " vs " + std::to_string(b.m) + "x" +
                         std::to_string(b.d));
  }
}

void require_len(Eigen::Index got, Eigen::Index want, const char* op) {
  if (got != want) {
    throw DimensionError(std::string(op) + ": expected length " + std::to_string(want) + ", got " +
                         std::to_string(got));
  }
}

}  // namespace

TruncationDims::TruncationDims(int m_, int d_) : m(m_), d(d_) {
  if (m < 1 || d < 1) throw DimensionError("truncation dimensions must be positive");
}

SeqVec::SeqVec(TruncationDims dims) : f_(Matrix::Zero(dims.m, dims.d)) {}

SeqVec::SeqVec(Matrix columns) : f_(std::move(columns)) {
  if (f_.rows() < 1 || f_.cols() < 1) throw DimensionError("SeqVec: empty matrix");
  require_finite(f_, "SeqVec");
}

SeqVec SeqVec::unit(TruncationDims dims, int i, int k) {
  SeqVec e(dims);
  e.f_(i, k) = 1.0;
  return e;
}

std::vector<double> SeqVec::flatten_row_major() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(f_.size()));
  for (Eigen::Index i = 0; i < f_.rows(); ++i)
    for (Eigen::Index k = 0; k < f_.cols(); ++k) out.push_back(f_(i, k));
  return out;
}

SeqVec& SeqVec::operator+=(const SeqVec& o) {
  require_same(dims(), o.dims(), "SeqVec +");
  f_ += o.f_;
  return *this;
}

SeqVec& SeqVec::operator-=(const SeqVec& o) {
  require_same(dims(), o.dims(), "SeqVec -");
  f_ -= o.f_;
  return *this;
}

SeqVec& SeqVec::operator*=(double s) {
  f_ *= s;
  return *this;
}

CovOp::CovOp(Matrix a) : a_(std::move(a)) {
  if (a_.rows() < 1 || a_.rows() != a_.cols()) throw DimensionError("CovOp: matrix must be square");
  require_finite(a_, "CovOp");
  const double scale = a_.cwiseAbs().maxCoeff();
  if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
    throw NotPositiveDefinite("CovOp: matrix is not symmetric");
  }
  Eigen::LLT<Matrix> llt(a_);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("CovOp: Cholesky factorization failed");
  l_ = llt.matrixL();
  if ((l_.diagonal().array() <= 0.0).any()) throw NotPositiveDefinite("CovOp: non-positive pivot");
}

Vector CovOp::apply(const Vector& x) const {
  require_len(x.size(), a_.rows(), "CovOp::apply");
  return a_ * x;
}

double CovOp::inner(const Vector& x, const Vector& y) const {
  require_len(x.size(), a_.rows(), "CovOp::inner");
  require_len(y.size(), a_.rows(), "CovOp::inner");
  return x.dot(a_ * y);
}

SeqVec bullet(const HVec& h, const Vector& x) {
  if (h.size() < 1 || x.size() < 1) throw DimensionError("bullet: empty operand");
  return SeqVec(Matrix(h * x.transpose()));
}

HVec bracket(const SeqVec& f, const Vector& x) {
  require_len(x.size(), f.d(), "bracket");
  return f.matrix() * x;
}

double inner_l2(const SeqVec& f, const SeqVec& g) {
  require_same(f.dims(), g.dims(), "inner_l2");
  return (f.matrix().array() * g.matrix().array()).sum();
}

double inner_A(const SeqVec& f, const SeqVec& g, const CovOp& a) {
  require_same(f.dims(), g.dims(), "inner_A");
  require_len(a.dim(), f.d(), "inner_A");
  return (f.matrix().array() * (g.matrix() * a.matrix()).array()).sum();
}

SeqVec apply_extended(const CovOp& a, const SeqVec& f) { return apply_extended(a.matrix(), f); }

SeqVec apply_extended(const Matrix& op, const SeqVec& f) {
  if (op.rows() != op.cols()) throw DimensionError("apply_extended: operator must be square");
  require_len(op.rows(), f.d(), "apply_extended");
  // Column k of the result is sum_l A_{lk} f_l = sum_l [f, e_l] . (A e_k)_l.
  return SeqVec(Matrix(f.matrix() * op));
}

std::vector<Vector> gram_schmidt_A(std::span<const Vector> xs, const CovOp& a, double tol) {
  if (xs.empty()) throw PreconditionError("gram_schmidt_A: empty input list");
  for (const Vector& x : xs) require_len(x.size(), a.dim(), "gram_schmidt_A");
  auto basis = orthonormalize<Vector>(
      xs, [&a](const Vector& x, const Vector& y) { return a.inner(x, y); }, tol);
  if (basis.empty()) throw PreconditionError("gram_schmidt_A: all inputs are zero or dependent");
  return basis;
}

ProjectionBlocks block_projection(const CovOp& a, int cut) {
  const int d = a.dim();
  if (cut < 1 || cut >= d) {
    throw PreconditionError("block_projection: cut must satisfy 1 <= N < d (N=" +
                            std::to_string(cut) + ", d=" + std::to_string(d) + ")");
  }
  const int rest = d - cut;
  const Matrix& A = a.matrix();
  Eigen::LLT<Matrix> cc(A.topLeftCorner(cut, cut));
  if (cc.info() != Eigen::Success) throw NotPositiveDefinite("block_projection: singular A_CC block");

  ProjectionBlocks out;
  out.cut = cut;
  out.P = Matrix::Zero(d, d);
  out.P.topLeftCorner(cut, cut).setIdentity();
  out.P.topRightCorner(cut, rest) = cc.solve(A.topRightCorner(cut, rest));
  out.PT = out.P.transpose();
  return out;
}

bool psd_check(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) throw PreconditionError("psd_check: matrix must be square");
  if (m.size() == 0) return true;
  const double scale = m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
    throw PreconditionError("psd_check: matrix is not symmetric");
  }
  if (scale == 0.0) return true;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  const double spectral = ev.cwiseAbs().maxCoeff();
  return ev.minCoeff() >= -tol * spectral;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("hadamard: shape mismatch");
  return a.cwiseProduct(b);
}

Matrix hadamard_exp(const Matrix& m) {
  Matrix sum = Matrix::Ones(m.rows(), m.cols());
  Matrix term = sum;
  for (int k = 1; k < 1000; ++k) {
    term = hadamard(term, m) / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() <= 1e-17 * sum.cwiseAbs().maxCoeff()) break;
  }
  return sum;
}

}  // namespace seqgauss
