#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "seqgauss/measure.hpp"

namespace seqgauss::oracle {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(factorial(n) / (factorial(k) * factorial(n - k)));
}

namespace {

double prob_sum(int n, double x, bool absolute) {
  double s = 0.0;
  for (int k = 0; 2 * k <= n; ++k) {
    const double c = factorial(n) / (std::ldexp(1.0, k) * factorial(k) * factorial(n - 2 * k));
    const double t = (k % 2 ? -c : c) * std::pow(x, n - 2 * k);
    s += absolute ? std::fabs(t) : t;
  }
  return s;
}

double phys_sum(int n, double x, bool absolute) {
  double s = 0.0;
  for (int k = 0; 2 * k <= n; ++k) {
    const double c = factorial(n) / (factorial(k) * factorial(n - 2 * k));
    const double t = (k % 2 ? -c : c) * std::pow(2.0 * x, n - 2 * k);
    s += absolute ? std::fabs(t) : t;
  }
  return s;
}

}  // namespace

double hermite_prob_sum(int n, double x) { return prob_sum(n, x, false); }
double hermite_phys_sum(int n, double x) { return phys_sum(n, x, false); }
double hermite_prob_abs_sum(int n, double x) { return prob_sum(n, x, true); }
double hermite_phys_abs_sum(int n, double x) { return phys_sum(n, x, true); }

namespace {

DenseTensor power(const DenseTensor& base, int k, TruncationDims dims) {
  DenseTensor out = DenseTensor::scalar(1.0, dims);
  for (int i = 0; i < k; ++i) out = outer(out, base);
  return out;
}

}  // namespace

double wick_closed_form_dense(int n, const CovOp& a, const SeqVec& w, const DenseTensor& t) {
  const TruncationDims dims = w.dims();
  const DenseTensor tau = DenseTensor::tau(a, dims);
  const DenseTensor omega = DenseTensor::from_seqvec(w);
  DenseTensor sum(n, dims);
  for (int k = 0; 2 * k <= n; ++k) {
    DenseTensor term = symmetrize_dense(outer(power(tau, k, dims), power(omega, n - 2 * k, dims)));
    const double c = factorial(n) / (std::ldexp(1.0, k) * factorial(k) * factorial(n - 2 * k));
    term *= (k % 2 ? -c : c);
    sum += term;
  }
  return contract(t, sum);
}

double monomial_via_wick(const SeqVec& phi, int n, const CovOp& a, const SeqVec& w) {
  const double s2 = inner_A(phi, phi, a);
  double s = 0.0;
  for (int k = 0; 2 * k <= n; ++k) {
    const double c = factorial(n) / (std::ldexp(1.0, k) * factorial(k) * factorial(n - 2 * k));
    s += c * std::pow(s2, k) * wick_eval(SymKernel::power(phi, n - 2 * k), a, w);
  }
  return s;
}

double monomial_via_wick_dense(const SeqVec& phi, int n, const CovOp& a, const SeqVec& w) {
  const TruncationDims dims = w.dims();
  const DenseTensor tau = DenseTensor::tau(a, dims);
  DenseTensor sum(n, dims);
  for (int k = 0; 2 * k <= n; ++k) {
    DenseTensor term = symmetrize_dense(outer(power(tau, k, dims), wick_functional_dense(n - 2 * k, a, w)));
    term *= factorial(n) / (std::ldexp(1.0, k) * factorial(k) * factorial(n - 2 * k));
    sum += term;
  }
  return contract(DenseTensor::from_kernel(SymKernel::power(phi, n)), sum);
}

double dense_inner_A(const DenseTensor& t, const DenseTensor& s, const CovOp& a) {
  if (t.degree() != s.degree() || !(t.dims() == s.dims())) throw DimensionError("dense_inner_A: shape mismatch");
  const int m = t.dims().m;
  const int side = t.side();
  Matrix g = Matrix::Zero(side, side);
  for (int k = 0; k < t.dims().d; ++k)
    for (int l = 0; l < t.dims().d; ++l)
      for (int i = 0; i < m; ++i) g(k * m + i, l * m + i) = a.matrix()(k, l);
  double sum = 0.0;
  for (std::size_t fi = 0; fi < t.size(); ++fi) {
    const auto ii = t.multi_index(fi);
    for (std::size_t fj = 0; fj < s.size(); ++fj) {
      const auto jj = s.multi_index(fj);
      double w = t[fi] * s[fj];
      for (int q = 0; q < t.degree() && w != 0.0; ++q) w *= g(ii[q], jj[q]);
      sum += w;
    }
  }
  return sum;
}

double max_asymmetry(const DenseTensor& t) {
  const int n = t.degree();
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> permuted(static_cast<std::size_t>(n));
  double worst = 0.0;
  do {
    for (std::size_t f = 0; f < t.size(); ++f) {
      const auto idx = t.multi_index(f);
      for (int s = 0; s < n; ++s) permuted[s] = idx[perm[s]];
      worst = std::max(worst, std::fabs(t[f] - t.at(permuted)));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return worst;
}

double wick_product_expectation(const SeqVec& phi, int n, const SeqVec& psi, int m, const CovOp& a) {
  const double s2 = inner_A(phi, phi, a);
  const double t2 = inner_A(psi, psi, a);
  auto coeff = [](int deg, int k) {
    const long double c = static_cast<long double>(factorial(deg)) /
                          (std::ldexp(1.0L, k) * factorial(k) * factorial(deg - 2 * k));
    return k % 2 ? -c : c;
  };
  // The alternating terms cancel heavily; accumulate in extended precision.
  long double total = 0.0L;
  for (int k = 0; 2 * k <= n; ++k)
    for (int j = 0; 2 * j <= m; ++j) {
      std::vector<SeqVec> factors;
      for (int i = 0; i < n - 2 * k; ++i) factors.push_back(phi);
      for (int i = 0; i < m - 2 * j; ++i) factors.push_back(psi);
      total += coeff(n, k) * coeff(m, j) * std::pow(static_cast<long double>(s2), k) *
               std::pow(static_cast<long double>(t2), j) * isserlis_moment(factors, a);
    }
  return static_cast<double>(total);
}

double power_iteration(const std::function<Matrix(const Matrix&)>& op, Matrix start, int iters, double tol) {
  Matrix x = start / start.norm();
  double lambda = 0.0;
  for (int i = 0; i < iters; ++i) {
    Matrix y = op(x);
    const double next = y.norm();
    if (next == 0.0) return 0.0;
    x = y / next;
    if (std::fabs(next - lambda) <= tol * next) return next;
    lambda = next;
  }
  return lambda;
}

double Generator::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

int Generator::uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

double Generator::normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

Vector Generator::vector(int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = normal();
  return v;
}

Matrix Generator::matrix(int rows, int cols) {
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = normal();
  return m;
}

SeqVec Generator::seqvec(TruncationDims dims) { return SeqVec(matrix(dims.m, dims.d)); }

Matrix Generator::spd(int n, double shift) {
  const Matrix g = matrix(n, n);
  Matrix a = g * g.transpose() / n + shift * Matrix::Identity(n, n);
  return 0.5 * (a + a.transpose());
}

Matrix Generator::gram(int n, int dim) {
  const Matrix x = matrix(dim, n);
  Matrix g = x.transpose() * x;
  return 0.5 * (g + g.transpose());
}

}  // namespace seqgauss::oracle
