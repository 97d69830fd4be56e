#include "seqgauss/chaos.hpp"

#include <algorithm>
#include <cmath>

namespace seqgauss {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

ChaosExpansion& ChaosExpansion::add(const SymKernel& k) {
  if (!(k.dims() == dims_)) throw DimensionError("ChaosExpansion::add: dimension mismatch");
  auto it = kernels_.find(k.degree());
  if (it == kernels_.end()) {
    kernels_.emplace(k.degree(), k);
  } else {
    it->second += k;
  }
  return *this;
}

const SymKernel* ChaosExpansion::kernel(int degree) const {
  auto it = kernels_.find(degree);
  return it == kernels_.end() ? nullptr : &it->second;
}

ConditioningSet::ConditioningSet(std::vector<SeqVec> basis, const CovOp& a) : basis_(std::move(basis)) {
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    if (!(basis_[i].dims() == basis_.front().dims())) throw DimensionError("ConditioningSet: mixed dimensions");
    for (std::size_t j = 0; j <= i; ++j) {
      const double g = inner_A(basis_[i], basis_[j], a);
      if (std::fabs(g - (i == j ? 1.0 : 0.0)) > kOrthonormalTol) {
        throw PreconditionError("ConditioningSet: basis is not A-orthonormal");
      }
    }
  }
}

ConditioningSet ConditioningSet::from_spanning(std::span<const SeqVec> xs, const CovOp& a, double tol) {
  auto basis = orthonormalize<SeqVec>(
      xs, [&a](const SeqVec& f, const SeqVec& g) { return inner_A(f, g, a); }, tol);
  return ConditioningSet(std::move(basis), a);
}

SeqVec ConditioningSet::project(const SeqVec& phi, const CovOp& a) const {
  SeqVec out(phi.dims());
  for (const auto& psi : basis_) out += inner_A(phi, psi, a) * psi;
  return out;
}

std::vector<double> ConditioningSet::coordinates(const SeqVec& w) const {
  std::vector<double> y;
  y.reserve(basis_.size());
  for (const auto& psi : basis_) y.push_back(pairing(psi, w));
  return y;
}

double eval_expansion(const ChaosExpansion& e, const CovOp& a, const SeqVec& w) {
  double s = 0.0;
  for (const auto& [n, k] : e.kernels()) s += wick_eval(k, a, w);
  return s;
}

double chaos_inner(const ChaosExpansion& e1, const ChaosExpansion& e2, const CovOp& a) {
  if (!(e1.dims() == e2.dims())) throw DimensionError("chaos_inner: dimension mismatch");
  double s = 0.0;
  for (const auto& [n, k1] : e1.kernels()) {
    if (const SymKernel* k2 = e2.kernel(n)) s += factorial(n) * kernel_inner_A(k1, *k2, a);
  }
  return s;
}

double chaos_norm(const ChaosExpansion& e, const CovOp& a) { return std::sqrt(std::max(chaos_inner(e, e, a), 0.0)); }

ChaosExpansion cond_exp_chaos(const ChaosExpansion& e, const ConditioningSet& c, const CovOp& a) {
  ChaosExpansion out(e.dims());
  for (const auto& [n, k] : e.kernels()) {
    if (n == 0) {
      out.add(k);
      continue;
    }
    SymKernel projected(n, k.dims());
    for (const auto& term : k.terms()) projected.add_term(term.coeff, c.project(term.base, a));
    out.add(projected);
  }
  return out;
}

SeqVec cond_exp_monomial(const SeqVec& f, std::span<const Vector> xs, const CovOp& a) {
  if (a.dim() != f.d()) throw DimensionError("cond_exp_monomial: covariance size mismatch");
  const auto basis = gram_schmidt_A(xs, a);
  SeqVec pf(f.dims());
  for (const Vector& x : basis) pf += bullet(bracket(f, a.apply(x)), x);
  return pf;
}

TestPolynomial::TestPolynomial(std::vector<Term> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_)
    for (int p : t.powers)
      if (p < 0) throw PreconditionError("TestPolynomial: negative power");
  if (degree() > kMaxDegree) throw PreconditionError("TestPolynomial: degree exceeds 6");
}

int TestPolynomial::degree() const {
  int deg = 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (int p : t.powers) s += p;
    deg = std::max(deg, s);
  }
  return deg;
}

double TestPolynomial::operator()(std::span<const double> y) const {
  double s = 0.0;
  for (const auto& t : terms_) {
    if (t.powers.size() > y.size()) throw DimensionError("TestPolynomial: too few coordinates");
    double v = t.coeff;
    for (std::size_t k = 0; k < t.powers.size(); ++k) v *= std::pow(y[k], t.powers[k]);
    s += v;
  }
  return s;
}

McEstimate mc_cond_check(const ChaosExpansion& e, const ConditioningSet& c, const TestPolynomial& g,
                         const SampleBatch& batch, const CovOp& a) {
  if (batch.samples.empty()) throw PreconditionError("mc_cond_check: empty batch");
  const ChaosExpansion ce = cond_exp_chaos(e, c, a);
  return mc_mean(batch, [&](const SeqVec& w) {
    const double residual = eval_expansion(e, a, w) - eval_expansion(ce, a, w);
    return residual * g(c.coordinates(w));
  });
}

}  // namespace seqgauss
