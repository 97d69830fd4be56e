#include "seqgauss/wick.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "seqgauss/hermite.hpp"

namespace seqgauss {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

void require_dims(TruncationDims got, TruncationDims want, const char* op) {
  if (!(got == want)) throw DimensionError(std::string(op) + ": dimension mismatch");
}

}  // namespace

SymKernel::SymKernel(int degree, TruncationDims dims) : degree_(degree), dims_(dims) {
  if (degree < 0) throw PreconditionError("SymKernel: degree must be non-negative");
}

SymKernel SymKernel::constant(double c, TruncationDims dims) {
  SymKernel k(0, dims);
  k.add_term(c, SeqVec(dims));
  return k;
}

SymKernel SymKernel::power(const SeqVec& phi, int n, double coeff) {
  SymKernel k(n, phi.dims());
  k.add_term(coeff, phi);
  return k;
}

void SymKernel::add_term(double coeff, SeqVec base) {
  require_dims(base.dims(), dims_, "SymKernel::add_term");
  terms_.push_back({coeff, std::move(base), degree_});
}

SymKernel& SymKernel::operator+=(const SymKernel& o) {
  if (o.degree_ != degree_) throw PreconditionError("SymKernel +=: degree mismatch");
  require_dims(o.dims_, dims_, "SymKernel +=");
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  return *this;
}

SymKernel& SymKernel::operator*=(double s) {
  for (auto& t : terms_) t.coeff *= s;
  return *this;
}

SymKernel polarize(std::span<const SeqVec> xs) {
  if (xs.empty()) throw PreconditionError("polarize: empty input");
  const int n = static_cast<int>(xs.size());
  if (n > 30) throw PreconditionError("polarize: degree too large");
  const TruncationDims dims = xs.front().dims();
  for (const auto& x : xs) require_dims(x.dims(), dims, "polarize");

  const double norm = 1.0 / (std::ldexp(1.0, n) * factorial(n));
  SymKernel out(n, dims);
  for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
    SeqVec base(dims);
    double sign = 1.0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1UL << i)) {
        base -= xs[i];
        sign = -sign;
      } else {
        base += xs[i];
      }
    }
    out.add_term(sign * norm, std::move(base));
  }
  return out;
}

DenseTensor::DenseTensor(int degree, TruncationDims dims) : degree_(degree), dims_(dims) {
  if (degree < 0 || degree > kMaxDegree) {
    throw PreconditionError("DenseTensor: degree must be in [0, 4], got " + std::to_string(degree));
  }
  if (dims.flat_size() > kMaxFlat) {
    throw PreconditionError("DenseTensor: m*d must be <= 6, got " + std::to_string(dims.flat_size()));
  }
  std::size_t n = 1;
  for (int i = 0; i < degree; ++i) n *= static_cast<std::size_t>(side());
  data_.assign(n, 0.0);
}

DenseTensor DenseTensor::scalar(double c, TruncationDims dims) {
  DenseTensor t(0, dims);
  t.data_[0] = c;
  return t;
}

DenseTensor DenseTensor::from_seqvec(const SeqVec& v) {
  DenseTensor t(1, v.dims());
  const Matrix& f = v.matrix();
  std::copy(f.data(), f.data() + f.size(), t.data_.begin());
  return t;
}

DenseTensor DenseTensor::from_kernel(const SymKernel& k) {
  DenseTensor out(k.degree(), k.dims());
  for (const auto& term : k.terms()) {
    DenseTensor p = scalar(term.coeff, k.dims());
    const DenseTensor v = from_seqvec(term.base);
    for (int i = 0; i < k.degree(); ++i) p = outer(p, v);
    out += p;
  }
  return out;
}

DenseTensor DenseTensor::tau(const CovOp& a, TruncationDims dims) {
  if (a.dim() != dims.d) throw DimensionError("DenseTensor::tau: covariance size mismatch");
  DenseTensor t(2, dims);
  const int m = dims.m;
  const int s = t.side();
  for (int k = 0; k < dims.d; ++k)
    for (int l = 0; l < dims.d; ++l)
      for (int i = 0; i < m; ++i) t.data_[static_cast<std::size_t>(k * m + i) * s + (l * m + i)] = a.matrix()(k, l);
  return t;
}

std::vector<int> DenseTensor::multi_index(std::size_t flat) const {
  std::vector<int> idx(static_cast<std::size_t>(degree_));
  const auto s = static_cast<std::size_t>(side());
  for (int slot = degree_ - 1; slot >= 0; --slot) {
    idx[static_cast<std::size_t>(slot)] = static_cast<int>(flat % s);
    flat /= s;
  }
  return idx;
}

std::size_t DenseTensor::flat_index(std::span<const int> multi) const {
  if (static_cast<int>(multi.size()) != degree_) throw DimensionError("DenseTensor: multi-index length");
  std::size_t flat = 0;
  for (int i : multi) flat = flat * static_cast<std::size_t>(side()) + static_cast<std::size_t>(i);
  return flat;
}

double DenseTensor::at(std::span<const int> multi) const { return data_[flat_index(multi)]; }

DenseTensor& DenseTensor::operator+=(const DenseTensor& o) {
  if (o.degree_ != degree_ || !(o.dims_ == dims_)) throw DimensionError("DenseTensor +=: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& o) {
  if (o.degree_ != degree_ || !(o.dims_ == dims_)) throw DimensionError("DenseTensor -=: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

DenseTensor& DenseTensor::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

DenseTensor outer(const DenseTensor& a, const DenseTensor& b) {
  if (!(a.dims() == b.dims())) throw DimensionError("outer: dimension mismatch");
  DenseTensor out(a.degree() + b.degree(), a.dims());
  const std::size_t nb = b.size();
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < nb; ++j) out[i * nb + j] = a[i] * b[j];
  return out;
}

double contract(const DenseTensor& a, const DenseTensor& b) {
  if (a.degree() != b.degree() || !(a.dims() == b.dims())) throw DimensionError("contract: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

DenseTensor symmetrize_dense(const DenseTensor& t) {
  const int n = t.degree();
  DenseTensor out(n, t.dims());
  if (n <= 1) return t;
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> permuted(static_cast<std::size_t>(n));
  int count = 0;
  do {
    ++count;
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
      const auto idx = t.multi_index(flat);
      for (int s = 0; s < n; ++s) permuted[static_cast<std::size_t>(s)] = idx[static_cast<std::size_t>(perm[s])];
      out[flat] += t.at(permuted);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  out *= 1.0 / count;
  return out;
}

double wick_eval(const SymKernel& k, const CovOp& a, const SeqVec& w) {
  require_dims(w.dims(), k.dims(), "wick_eval");
  if (a.dim() != w.d()) throw DimensionError("wick_eval: covariance size mismatch");
  const int n = k.degree();
  double sum = 0.0;
  for (const auto& term : k.terms()) {
    if (n == 0) {
      sum += term.coeff;
      continue;
    }
    const double s2 = inner_A(term.base, term.base, a);
    if (s2 == 0.0) continue;
    sum += term.coeff * scaled_hermite(n, inner_l2(term.base, w), s2);
  }
  return sum;
}

DenseTensor wick_functional_dense(int n, const CovOp& a, const SeqVec& w) {
  if (n < 0) throw PreconditionError("wick_functional_dense: negative degree");
  const TruncationDims dims = w.dims();
  DenseTensor prev2 = DenseTensor::scalar(1.0, dims);
  if (n == 0) return prev2;
  const DenseTensor omega = DenseTensor::from_seqvec(w);
  DenseTensor prev1 = omega;
  if (n == 1) return prev1;
  const DenseTensor tau = DenseTensor::tau(a, dims);
  for (int k = 2; k <= n; ++k) {
    DenseTensor next = symmetrize_dense(outer(omega, prev1));
    DenseTensor corr = symmetrize_dense(outer(tau, prev2));
    corr *= static_cast<double>(k - 1);
    next -= corr;
    prev2 = std::move(prev1);
    prev1 = std::move(next);
  }
  return prev1;
}

double wick_eval_dense(int n, const CovOp& a, const SeqVec& w, const DenseTensor& t) {
  if (t.degree() != n) throw DimensionError("wick_eval_dense: tensor degree differs from n");
  return contract(t, wick_functional_dense(n, a, w));
}

double kernel_inner_A(const SymKernel& k1, const SymKernel& k2, const CovOp& a) {
  if (k1.degree() != k2.degree()) throw PreconditionError("kernel_inner_A: degree mismatch");
  require_dims(k1.dims(), k2.dims(), "kernel_inner_A");
  const int n = k1.degree();
  double s = 0.0;
  for (const auto& t1 : k1.terms())
    for (const auto& t2 : k2.terms()) {
      const double ip = n == 0 ? 1.0 : inner_A(t1.base, t2.base, a);
      s += t1.coeff * t2.coeff * std::pow(ip, n);
    }
  return s;
}

}  // namespace seqgauss
