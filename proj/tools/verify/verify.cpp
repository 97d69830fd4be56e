#include "verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "oracle.hpp"
#include "seqgauss/chaos.hpp"
#include "seqgauss/closure.hpp"
#include "seqgauss/errors.hpp"
#include "seqgauss/hermite.hpp"
#include "seqgauss/linalg.hpp"
#include "seqgauss/measure.hpp"
#include "seqgauss/wick.hpp"

namespace seqgauss::verify {

namespace {

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << v;
  return os.str();
}

// Worst error against a bound, reported as "max err X (tol Y)".
struct Worst {
  double tol;
  double value = 0.0;

  void add(double e) { value = std::isnan(e) ? e : std::max(value, e); }
  bool ok() const { return value <= tol; }
  CheckResult result(std::string name) const {
    return {std::move(name), ok(), "max err " + sci(value) + " (tol " + sci(tol) + ")"};
  }
};

// Counts Monte Carlo comparisons that fall outside k standard errors.
struct McTally {
  double sigmas;
  int total = 0;
  int outside = 0;
  double worst_z = 0.0;

  void add(const McEstimate& est, double expected) {
    ++total;
    if (!est.within(expected, sigmas)) ++outside;
    if (est.std_error > 0.0) worst_z = std::max(worst_z, std::fabs(est.value - expected) / est.std_error);
  }
  CheckResult result(std::string name) const {
    return {std::move(name), outside == 0,
            std::to_string(total - outside) + "/" + std::to_string(total) + " within " + sci(sigmas) +
                " std errors (worst " + sci(worst_z) + ")"};
  }
};

double rel(double got, double want) { return std::fabs(got - want) / std::max(1.0, std::fabs(want)); }

double max_abs(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

double max_abs(const DenseTensor& a, const DenseTensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

oracle::Generator generator(const Context& ctx, std::uint64_t salt) {
  return oracle::Generator(ctx.seed * 0x9E3779B97F4A7C15ULL + salt);
}

SymKernel random_kernel(oracle::Generator& gen, int degree, TruncationDims dims, int terms) {
  SymKernel k(degree, dims);
  for (int t = 0; t < terms; ++t) k.add_term(gen.normal(), gen.seqvec(dims));
  return k;
}

ChaosExpansion random_expansion(oracle::Generator& gen, TruncationDims dims, int max_degree, int terms) {
  ChaosExpansion e(dims);
  e.add(SymKernel::constant(gen.normal(), dims));
  for (int n = 1; n <= max_degree; ++n) {
    SymKernel k(n, dims);
    for (int t = 0; t < terms; ++t) k.add_term(gen.normal(), gen.seqvec(dims) * 0.5);
    e.add(k);
  }
  return e;
}

double kernelwise_diff(const ChaosExpansion& e1, const ChaosExpansion& e2) {
  double m = 0.0;
  for (const auto& [deg, k] : e1.kernels()) {
    const SymKernel* other = e2.kernel(deg);
    if (other == nullptr) return std::numeric_limits<double>::infinity();
    m = std::max(m, max_abs(DenseTensor::from_kernel(k), DenseTensor::from_kernel(*other)));
  }
  return m;
}

// A e1 = e1 + e2/2, A e2 = e1/2 + e2, identity elsewhere.
CovOp half_coupled(int d) {
  Matrix a = Matrix::Identity(d, d);
  a(0, 1) = a(1, 0) = 0.5;
  return CovOp(a);
}

MomentGrid gaussian_bump(const UniformGrid& g, int order) {
  MomentGrid s;
  s.values = Matrix::Zero(g.cells, order + 1);
  for (int j = 0; j < g.cells; ++j) s.values(j, 0) = std::exp(-std::pow(g.center(j) / 0.1, 2) / 2.0);
  return s;
}

}  // namespace

const std::map<std::string, double>& Tolerances::defaults() {
  static const std::map<std::string, double> d{
      {"hermite.orthogonality", 1e-8}, {"hermite.relative", 1e-9},   {"wick.equivalence", 1e-10},
      {"wick.repolarization", 1e-9},   {"wick.orthogonality", 1e-9}, {"mc.sigmas", 4.0},
      {"condexp.example", 1e-12},      {"condexp.invariant", 1e-10}, {"projection", 1e-10},
      {"closure.exact", 1e-12},        {"psd", 1e-9},                {"divergence", 1e-9},
      {"divergence.slack", 1e-6},
  };
  return d;
}

Tolerances::Tolerances() : values_(defaults()) {}

double Tolerances::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("--tol " + key, "unknown tolerance");
  return it->second;
}

void Tolerances::set(const std::string& key, double value) {
  if (!values_.contains(key)) throw ConfigError("--tol " + key, "unknown tolerance");
  if (!(value > 0.0) || !std::isfinite(value)) throw ConfigError("--tol " + key, "must be a positive number");
  values_[key] = value;
}

void Tolerances::set_from_string(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--tol " + assignment, "expected key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ConfigError("--tol " + key, "value is not a number");
  set(key, v);
}

std::vector<CheckResult> hermite_checks(const Context& ctx) {
  std::vector<CheckResult> out;
  oracle::Generator gen = generator(ctx, 1);

  Worst ortho{ctx.tol.get("hermite.orthogonality")};
  for (int n = 0; n <= 10; ++n)
    for (int m = 0; m <= 10; ++m) {
      const double v = gh_expectation([&](double x) { return hermite_prob(n, x) * hermite_prob(m, x); });
      ortho.add(std::fabs(v - (n == m ? oracle::factorial(n) : 0.0)));
    }
  out.push_back(ortho.result("hermite/quadrature orthogonality n,m<=10"));

  const double tol = ctx.tol.get("hermite.relative");
  Worst rel1{tol}, rel2{tol}, binom{tol};
  for (int trial = 0; trial < 100; ++trial) {
    const int n = gen.uniform_int(0, 12);
    const double x = gen.uniform(-4.0, 4.0);
    const double lhs1 = hermite_prob(n, x);
    const double rhs1 = std::pow(2.0, -n / 2.0) * hermite_phys(n, x / std::sqrt(2.0));
    rel1.add(std::fabs(lhs1 - rhs1) / std::max(1.0, oracle::hermite_prob_abs_sum(n, x)));
    const double lhs2 = hermite_phys(n, x);
    const double rhs2 = std::pow(2.0, n / 2.0) * hermite_prob(n, std::sqrt(2.0) * x);
    rel2.add(std::fabs(lhs2 - rhs2) / std::max(1.0, oracle::hermite_phys_abs_sum(n, x)));
  }
  for (int trial = 0; trial < 100; ++trial) {
    const int n = gen.uniform_int(0, 10);
    const double theta = gen.uniform(0.0, 2.0 * std::numbers::pi);
    const double alpha = std::cos(theta), beta = std::sin(theta);
    const double x = gen.uniform(-3.0, 3.0), y = gen.uniform(-3.0, 3.0);
    double sum = 0.0, scale = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double t = oracle::binomial(n, k) * std::pow(alpha, k) * std::pow(beta, n - k) * hermite_prob(k, x) *
                       hermite_prob(n - k, y);
      sum += t;
      scale += std::fabs(t);
    }
    binom.add(std::fabs(hermite_prob(n, alpha * x + beta * y) - sum) / std::max(1.0, scale));
  }
  out.push_back(rel1.result("hermite/H_n(x) = 2^(-n/2) Hh_n(x/sqrt2), 100 draws"));
  out.push_back(rel2.result("hermite/Hh_n(x) = 2^(n/2) H_n(sqrt2 x), 100 draws"));
  out.push_back(binom.result("hermite/binomial expansion, 100 draws"));
  return out;
}

std::vector<CheckResult> wick_equivalence_checks(const Context& ctx) {
  std::vector<CheckResult> out;
  oracle::Generator gen = generator(ctx, 2);
  const double tol = ctx.tol.get("wick.equivalence");
  const std::array<TruncationDims, 4> shapes{TruncationDims(1, 6), TruncationDims(2, 3), TruncationDims(3, 2),
                                             TruncationDims(2, 2)};

  Worst rec_closed{tol}, pol_closed{tol};
  for (int trial = 0; trial < 50; ++trial) {
    const TruncationDims dims = shapes[static_cast<std::size_t>(trial % 4)];
    const int n = 1 + trial % 4;
    const CovOp a = gen.covariance(dims.d);
    const SeqVec w = gen.seqvec(dims);
    const SymKernel k = random_kernel(gen, n, dims, 3);
    const DenseTensor t = DenseTensor::from_kernel(k);
    const double closed = oracle::wick_closed_form_dense(n, a, w, t);
    rec_closed.add(rel(wick_eval_dense(n, a, w, t), closed));
    pol_closed.add(rel(wick_eval(k, a, w), closed));
  }
  out.push_back(rec_closed.result("wick/recursion vs closed form, n<=4, 50 kernels"));
  out.push_back(pol_closed.result("wick/polarized Hermite evaluation vs closed form, 50 kernels"));

  Worst inverse{tol};
  for (int trial = 0; trial < 50; ++trial) {
    const TruncationDims dims = shapes[static_cast<std::size_t>(trial % 4)];
    const CovOp a = gen.covariance(dims.d);
    const SeqVec phi = gen.seqvec(dims), w = gen.seqvec(dims);
    for (int n = 0; n <= 4; ++n) {
      const double want = std::pow(inner_l2(phi, w), n);
      inverse.add(rel(oracle::monomial_via_wick(phi, n, a, w), want));
      inverse.add(rel(oracle::monomial_via_wick_dense(phi, n, a, w), want));
    }
  }
  out.push_back(inverse.result("wick/inverse identity recovers <phi,W>^n, n<=4"));

  Worst repol{ctx.tol.get("wick.repolarization")};
  for (int trial = 0; trial < 20; ++trial) {
    const TruncationDims dims(2, 2);
    const CovOp a = gen.covariance(2);
    const SeqVec x = gen.seqvec(dims), y = gen.seqvec(dims), z = gen.seqvec(dims), w = gen.seqvec(dims);
    const std::array<SeqVec, 2> xy{x, y};
    SymKernel alt = SymKernel::power(x + y, 2, 0.25);
    alt += SymKernel::power(x - y, 2, -0.25);
    const SymKernel k1 = polarize(xy);
    repol.add(max_abs(DenseTensor::from_kernel(k1), DenseTensor::from_kernel(alt)));
    repol.add(rel(wick_eval(k1, a, w), wick_eval(alt, a, w)));
    const std::array<SeqVec, 3> xyz{x, y, z}, zxy{z, x, y};
    repol.add(rel(wick_eval(polarize(xyz), a, w), wick_eval(polarize(zxy), a, w)));
  }
  out.push_back(repol.result("wick/re-polarization invariance"));
  return out;
}

std::vector<CheckResult> wick_orthogonality_checks(const Context& ctx) {
  oracle::Generator gen = generator(ctx, 3);
  Worst worst{ctx.tol.get("wick.orthogonality")};
  for (int trial = 0; trial < 20; ++trial) {
    const int d = gen.uniform_int(1, 3);
    const TruncationDims dims(gen.uniform_int(1, 2), d);
    const CovOp a = gen.covariance(d);
    const SeqVec phi = gen.seqvec(dims), psi = gen.seqvec(dims);
    const double ip = inner_A(phi, psi, a);
    for (int n = 0; n <= 4; ++n)
      for (int m = 0; m <= 4; ++m) {
        const double want = n == m ? oracle::factorial(n) * std::pow(ip, n) : 0.0;
        worst.add(rel(oracle::wick_product_expectation(phi, n, psi, m, a), want));
      }
  }
  return {worst.result("measure/E[:phi^n: :psi^m:] = delta n! (phi,psi)_A^n via Isserlis, n,m<=4")};
}

std::vector<CheckResult> measure_checks(const Context& ctx) {
  std::vector<CheckResult> out;
  oracle::Generator gen = generator(ctx, 4);
  const double sigmas = ctx.tol.get("mc.sigmas");

  {
    const CovOp a = gen.covariance(3);
    const SampleBatch b1 = sample_mu_A(a, 2, 5000, ctx.seed, 1);
    const SampleBatch b2 = sample_mu_A(a, 2, 5000, ctx.seed, 4);
    bool same = b1.samples.size() == b2.samples.size();
    for (std::size_t i = 0; same && i < b1.samples.size(); ++i) same = b1.samples[i].matrix() == b2.samples[i].matrix();
    out.push_back({"measure/sampling is reproducible across thread counts", same, same ? "identical" : "differs"});
  }

  const int d = 4;
  const TruncationDims dims(2, d);
  const CovOp a = gen.covariance(d);
  const SampleBatch batch = sample_mu_A(a, dims.m, ctx.samples, ctx.seed, ctx.threads);

  McTally cf{sigmas};
  for (int trial = 0; trial < 5; ++trial) {
    SeqVec phi = gen.seqvec(dims);
    phi *= gen.uniform(0.3, 2.0) / norm_A(phi, a);
    const ComplexMcEstimate c = char_function_mc(phi, batch);
    cf.add(c.real, std::exp(-0.5 * inner_A(phi, phi, a)));
    cf.add(c.imag, 0.0);
  }
  out.push_back(cf.result("measure/characteristic function vs exp(-|phi|_A^2/2)"));

  McTally var{sigmas};
  for (int trial = 0; trial < 5; ++trial) {
    const SeqVec phi = gen.seqvec(dims), psi = gen.seqvec(dims);
    var.add(mc_mean(batch, [&](const SeqVec& w) { return pairing(phi, w) * pairing(psi, w); }), inner_A(phi, psi, a));
  }
  out.push_back(var.result("measure/empirical covariance vs (phi,psi)_A"));

  std::vector<SeqVec> raw;
  for (int i = 0; i < 3; ++i) raw.push_back(gen.seqvec(dims));
  const auto ortho = orthonormalize<SeqVec>(
      raw, [&](const SeqVec& x, const SeqVec& y) { return inner_A(x, y, a); }, 1e-12);
  bool push_ok = ortho.size() == 3;
  std::string push_detail = "sizes";
  for (std::size_t q = 1; push_ok && q <= 3; ++q) {
    const PushforwardReport rep = pushforward_check(std::span(ortho).first(q), a, batch, sigmas);
    push_ok = rep.ok();
    push_detail += " " + std::to_string(q) + (rep.ok() ? ":ok" : ":flagged");
  }
  out.push_back({"measure/pushforward of A-orthonormal systems is standard normal", push_ok, push_detail});

  McTally prod{sigmas};
  for (int n = 1; n <= 4; ++n)
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<SeqVec> phis;
      for (int i = 0; i < n; ++i) phis.push_back(gen.seqvec(dims));
      prod.add(mc_mean(batch,
                       [&](const SeqVec& w) {
                         double p = 1.0;
                         for (const auto& phi : phis) p *= pairing(phi, w);
                         return p;
                       }),
               isserlis_moment(phis, a));
    }
  out.push_back(prod.result("measure/MC product moments vs Isserlis, n<=4"));
  return out;
}

std::vector<CheckResult> condexp_checks(const Context& ctx) {
  std::vector<CheckResult> out;
  oracle::Generator gen = generator(ctx, 5);
  const double tex = ctx.tol.get("condexp.example");
  const double tinv = ctx.tol.get("condexp.invariant");

  {
    const int d = 4;
    const CovOp a = half_coupled(d);
    const SeqVec f = gen.seqvec(TruncationDims(3, d));
    const Matrix& fm = f.matrix();
    const std::array<Vector, 1> e1{Vector::Unit(d, 0)};
    const std::array<Vector, 2> e12{Vector::Unit(d, 0), Vector::Unit(d, 1)};
    Worst one{tex}, two{tex}, gs{tex};
    one.add(max_abs(cond_exp_monomial(f, e1, a).matrix(),
                    bullet(fm.col(0) + 0.5 * fm.col(1), Vector::Unit(d, 0)).matrix()));
    two.add(max_abs(cond_exp_monomial(f, e12, a).matrix(),
                    (bullet(fm.col(0), Vector::Unit(d, 0)) + bullet(fm.col(1), Vector::Unit(d, 1))).matrix()));
    const auto hat = gram_schmidt_A(e12, a);
    const Vector e2hat = std::sqrt(4.0 / 3.0) * (Vector::Unit(d, 1) - 0.5 * Vector::Unit(d, 0));
    gs.add(hat.size() == 2 ? max_abs(hat[1], e2hat) : std::numeric_limits<double>::infinity());
    out.push_back(one.result("chaos/E[<f,.>|e1] = (f1 + f2/2).e1"));
    out.push_back(two.result("chaos/E[<f,.>|e1,e2] = f1.e1 + f2.e2"));
    out.push_back(gs.result("chaos/Gram-Schmidt gives sqrt(4/3)(e2 - e1/2)"));
  }

  Worst idem{tinv}, contraction{tinv}, span{tinv}, additivity{tinv}, consistency{tinv};
  const TruncationDims cdims(2, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const CovOp a = gen.covariance(cdims.d);
    std::vector<SeqVec> raw;
    const int q = gen.uniform_int(1, 3);
    for (int i = 0; i < q; ++i) raw.push_back(gen.seqvec(cdims));
    const ConditioningSet c = ConditioningSet::from_spanning(raw, a);
    const ChaosExpansion e = random_expansion(gen, cdims, 3, 2);
    const ChaosExpansion ce = cond_exp_chaos(e, c, a);
    idem.add(kernelwise_diff(ce, cond_exp_chaos(ce, c, a)));
    contraction.add(std::max(0.0, chaos_norm(ce, a) - chaos_norm(e, a)));

    const int d = gen.uniform_int(2, 5), m = gen.uniform_int(1, 3);
    const TruncationDims dims(m, d);
    const CovOp b = gen.covariance(d);
    const SeqVec f = gen.seqvec(dims);
    const double fscale = std::max(1.0, f.norm());
    const int n = gen.uniform_int(1, d);
    std::vector<Vector> xs;
    for (int i = 0; i < n; ++i) xs.push_back(gen.vector(d));
    const auto xhat = gram_schmidt_A(xs, b);
    const SeqVec pf = cond_exp_monomial(f, xhat, b);

    SeqVec sum(dims);
    for (const auto& x : xhat) sum += cond_exp_monomial(f, std::span<const Vector>(&x, 1), b);
    additivity.add(max_abs(pf.matrix(), sum.matrix()) / fscale);

    const Matrix mix = gen.matrix(n, n) + 3.0 * Matrix::Identity(n, n);
    std::vector<Vector> ys;
    for (int j = 0; j < n; ++j) {
      Vector y = Vector::Zero(d);
      for (int i = 0; i < n; ++i) y += mix(i, j) * xs[static_cast<std::size_t>(i)];
      ys.push_back(y);
    }
    span.add(max_abs(cond_exp_monomial(f, ys, b).matrix(), cond_exp_monomial(f, xs, b).matrix()) / fscale);

    std::vector<SeqVec> basis;
    for (const auto& x : xhat)
      for (int i = 0; i < m; ++i) basis.push_back(bullet(Vector::Unit(m, i), x));
    const ConditioningSet cs(basis, b);
    ChaosExpansion lin(dims);
    lin.add(SymKernel::power(f, 1));
    consistency.add(max_abs(cond_exp_chaos(lin, cs, b).kernel(1)->terms().front().base.matrix(), pf.matrix()) / fscale);
  }
  out.push_back(idem.result("chaos/projection idempotence, 100 instances"));
  out.push_back(contraction.result("chaos/contraction in L2(mu_A), 100 instances"));
  out.push_back(span.result("chaos/span invariance, 100 instances"));
  out.push_back(additivity.result("chaos/additivity over A-orthonormal vectors, 100 instances"));
  out.push_back(consistency.result("chaos/chaos projection matches monomial formula, 100 instances"));

  McTally weak{ctx.tol.get("mc.sigmas")};
  const TruncationDims wdims(1, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const CovOp a = gen.covariance(3);
    const SampleBatch batch = sample_mu_A(a, 1, ctx.samples, ctx.seed + 1000 + static_cast<std::uint64_t>(trial),
                                          ctx.threads);
    std::vector<SeqVec> raw{gen.seqvec(wdims)};
    if (trial % 2) raw.push_back(gen.seqvec(wdims));
    const ConditioningSet c = ConditioningSet::from_spanning(raw, a);
    const ChaosExpansion e = random_expansion(gen, wdims, 2, 2);
    std::vector<TestPolynomial::Term> terms{{1.0, {}}, {gen.normal(), {1}}, {gen.normal(), {2}}};
    if (c.size() == 2) terms.push_back({gen.normal(), {1, 1}});
    weak.add(mc_cond_check(e, c, TestPolynomial(terms), batch, a), 0.0);
  }
  out.push_back(weak.result("chaos/E[(F - E[F|G]) g] = 0 by Monte Carlo, 20 expansions"));
  return out;
}

std::vector<CheckResult> block_projection_checks(const Context& ctx) {
  oracle::Generator gen = generator(ctx, 6);
  const double tol = ctx.tol.get("projection");
  Worst idem{tol}, selfadj{tol}, contr{tol}, weak{tol};
  int cases = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int d = gen.uniform_int(2, 12);
    const CovOp a = gen.covariance(d);
    const Matrix& am = a.matrix();
    for (int cut = 1; cut < d; ++cut) {
      ++cases;
      const ProjectionBlocks pb = block_projection(a, cut);
      const double pscale = std::max(1.0, pb.P.cwiseAbs().maxCoeff());
      idem.add(max_abs(pb.P * pb.P, pb.P) / pscale);
      const Matrix ap = am * pb.P;
      selfadj.add(max_abs(ap, pb.PT * am) / std::max(1.0, ap.cwiseAbs().maxCoeff()));
      for (int s = 0; s < 5; ++s) {
        const Vector x = gen.vector(d);
        contr.add(std::max(0.0, a.norm(pb.P * x) - a.norm(x)) / std::max(1.0, a.norm(x)));
      }
      const TruncationDims dims(2, d);
      const SeqVec phi = gen.seqvec(dims), omega = gen.seqvec(dims);
      // P acts on the sequence index: column-wise application is F P^T.
      const SeqVec pphi = apply_extended(Matrix(pb.P.transpose()), phi);
      const SeqVec ptw = apply_extended(Matrix(pb.PT.transpose()), omega);
      const double scale = std::max(1.0, pphi.norm() * omega.norm() + phi.norm() * ptw.norm());
      weak.add(std::fabs(inner_l2(pphi, omega) - inner_l2(phi, ptw)) / scale);
    }
  }
  const std::string suffix = ", " + std::to_string(cases) + " (A, N) pairs";
  return {idem.result("core/P^2 = P" + suffix), selfadj.result("core/A P = P^T A" + suffix),
          contr.result("core/|Px|_A <= |x|_A" + suffix), weak.result("core/<P phi, w> = <phi, P^T w>" + suffix)};
}

std::vector<CheckResult> closure_checks(const Context& ctx) {
  std::vector<CheckResult> out;
  oracle::Generator gen = generator(ctx, 7);
  const double tol = ctx.tol.get("closure.exact");

  const MomentSystemCoeffs c = build_moment_system(3);
  const bool exact = c.b(0, 1) == 1.0 && c.b(1, 0) == 1.0 / 3.0 && c.b(1, 2) == 2.0 / 3.0;
  const Vector ab = c.absorption(0.3, 2.0);
  const Vector src = c.source(0.5, 4.0);
  const bool rates = ab(0) == 0.3 && ab(1) == 2.3 && src(0) == 4.0 && src.tail(3).isZero(0.0);
  out.push_back({"closure/b_01 = 1, b_10 = 1/3, b_12 = 2/3 exactly", exact, exact ? "exact" : "mismatch"});
  out.push_back({"closure/c_0 = kappa, c_k = kappa + sigma, only q_0 sourced", rates, rates ? "exact" : "mismatch"});

  {
    Matrix half(2, 2);
    half << 1.0, 0.5, 0.5, 1.0;
    Worst row{tol};
    row.add(std::fabs(closure_row(ClosureSpec::optimal_prediction(CovOp(half)), 0)(0) - 0.5));
    for (int trial = 0; trial < 10; ++trial) {
      const int order = gen.uniform_int(0, 5);
      const Matrix a = gen.spd(order + 2 + gen.uniform_int(0, 3));
      const Vector r1 = closure_row(ClosureSpec::optimal_prediction(CovOp(a)), order);
      const Vector r2 = closure_row(ClosureSpec::optimal_prediction(CovOp(gen.uniform(0.01, 100.0) * a)), order);
      row.add((r1 - r2).cwiseAbs().maxCoeff() / std::max(1.0, r1.cwiseAbs().maxCoeff()));
    }
    out.push_back(row.result("closure/closure row: [1,1/2;1/2,1] gives 1/2, invariant under scaling A"));
  }

  const UniformGrid grid{-1.0, 1.0, 100};
  {
    const MaterialParams p = MaterialParams::uniform(grid, 1.0, 0.5, 0.2);
    const MomentGrid init = gaussian_bump(grid, 3);
    SolveOptions opts;
    opts.dt = max_stable_dt(close_system(3, ClosureSpec::pn()), grid);
    opts.final_time = 200 * opts.dt;
    opts.output_stride = 1;
    const auto pn = solve_closure(init, p, ClosureSpec::pn(), opts);
    const auto op = solve_closure(init, p, ClosureSpec::optimal_prediction(CovOp::identity(8)), opts);
    Worst same{tol};
    if (pn.size() != op.size() || pn.size() != 201) same.add(std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < std::min(pn.size(), op.size()); ++i) same.add(max_abs(pn[i].values, op[i].values));
    out.push_back(same.result("closure/P_N = optimal prediction with A = Id, 200 steps, J=100, N=3"));

    Matrix blockdiag = Matrix::Zero(7, 7);
    blockdiag.topLeftCorner(4, 4) = gen.spd(4);
    blockdiag.bottomRightCorner(3, 3) = gen.spd(3);
    const auto bd = solve_closure(init, p, ClosureSpec::optimal_prediction(CovOp(blockdiag)), opts);
    bool bitwise = bd.size() == pn.size();
    for (std::size_t i = 0; bitwise && i < pn.size(); ++i) bitwise = bd[i].values == pn[i].values;
    out.push_back({"closure/block-diagonal A reproduces P_N bitwise", bitwise, bitwise ? "identical" : "differs"});
  }

  {
    const MaterialParams p = MaterialParams::uniform(grid, 0.0, 0.0);
    Worst cons{tol};
    for (const ClosureSpec& spec : {ClosureSpec::pn(), ClosureSpec::optimal_prediction(CovOp(gen.spd(6)))}) {
      const ClosedSystem sys = close_system(3, spec);
      MomentGrid st;
      st.values = gen.matrix(grid.cells, 4);
      const Vector sums0 = st.values.colwise().sum();
      const double dt = max_stable_dt(sys, grid);
      for (int n = 0; n < 200; ++n) {
        st = step(st, sys, p, dt);
        cons.add((Vector(st.values.colwise().sum()) - sums0).cwiseAbs().maxCoeff());
      }
    }
    out.push_back(cons.result("closure/per-moment sums conserved when sigma = kappa = q = 0"));
  }

  {
    const MaterialParams p = MaterialParams::uniform(grid, 0.0, 0.0);
    SolveOptions opts;
    opts.final_time = 0.5;
    opts.dt = max_stable_dt(close_system(7, ClosureSpec::pn()), grid);
    opts.output_stride = 1 << 20;
    std::vector<Matrix> finals;
    for (int order : {3, 5, 7})
      finals.push_back(solve_closure(gaussian_bump(grid, order), p, ClosureSpec::pn(), opts).back().values);
    auto l2 = [&](const Matrix& lo, const Matrix& hi) {
      return std::sqrt(grid.dx() * (lo - hi.leftCols(lo.cols())).squaredNorm());
    };
    const double d35 = l2(finals[0], finals[1]), d57 = l2(finals[1], finals[2]);
    const bool ok = d35 > 0.0 && d57 < d35;
    out.push_back({"closure/refinement N=3,5,7: inter-level L2 differences decrease", ok,
                   "|I3-I5| = " + sci(d35) + ", |I5-I7| = " + sci(d57)});
  }

  {
    const UniformGrid g{0.0, 1.0, 20};
    MomentGrid st;
    st.values = Matrix::Constant(20, 4, 2.0);
    const ClosedSystem sys = close_system(3, ClosureSpec::pn());
    const bool still = step(st, sys, MaterialParams::uniform(g, 0.0, 0.0), 0.01).values == st.values;
    const MomentGrid dec = step(st, sys, MaterialParams::uniform(g, 0.0, 0.7), 0.01);
    Worst decay{tol};
    decay.add((dec.values.col(0).array() - 2.0 * (1.0 - 0.7 * 0.01)).abs().maxCoeff());
    out.push_back({"closure/constant data without sources is unchanged", still, still ? "identical" : "changed"});
    out.push_back(decay.result("closure/absorption step I_0 (1 - kappa dt)"));
  }
  return out;
}

std::vector<CheckResult> psd_checks(const Context& ctx) {
  oracle::Generator gen = generator(ctx, 8);
  const double tol = ctx.tol.get("psd");
  int schur = 0, expo = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = gen.uniform_int(2, 8);
    const Matrix g1 = gen.gram(n, gen.uniform_int(1, n));
    const Matrix g2 = gen.gram(n, gen.uniform_int(1, n));
    if (psd_check(hadamard(g1, g2), tol)) ++schur;
    if (psd_check(hadamard_exp(g1), tol) && psd_check(hadamard_exp(g2), tol)) ++expo;
  }
  return {{"core/Schur product of PSD Gram pairs is PSD", schur == 50, std::to_string(schur) + "/50 pass"},
          {"core/entrywise exponential of PSD Gram matrices is PSD", expo == 50, std::to_string(expo) + "/50 pass"}};
}

std::vector<CheckResult> divergence_checks(const Context& ctx) {
  const int d = 2048;
  Matrix diag = Matrix::Zero(d, d);
  Vector x(d);
  for (int k = 1; k <= d; ++k) {
    diag(k - 1, k - 1) = 1.0 / (static_cast<double>(k) * k);
    x(k - 1) = 1.0 / k;
  }
  const CovOp a(diag);
  const HVec h = Vector::Unit(2, 0);
  Worst harmonic_err{ctx.tol.get("divergence")};
  const double bound = std::numbers::pi / std::sqrt(6.0) + ctx.tol.get("divergence.slack");
  double worst_norm = 0.0;
  for (int n : {16, 256, 2048}) {
    Vector ones = Vector::Zero(d);
    ones.head(n).setOnes();
    const SeqVec f = bullet(h, ones);
    double harmonic = 0.0;
    for (int k = 1; k <= n; ++k) harmonic += 1.0 / k;
    harmonic_err.add(std::fabs(bracket(f, x).norm() - harmonic));
    worst_norm = std::max(worst_norm, norm_A(f, a));
  }
  return {harmonic_err.result("core/|[f_n, x]| equals the harmonic number, n = 16, 256, 2048"),
          {"core/|f_n|_A stays below pi/sqrt6", worst_norm < bound,
           "max " + std::to_string(worst_norm) + " (bound " + std::to_string(bound) + ")"}};
}

std::vector<CheckResult> linalg_identity_checks(const Context& ctx) {
  oracle::Generator gen = generator(ctx, 9);
  Worst w{1e-12};
  for (int trial = 0; trial < 50; ++trial) {
    const int m = gen.uniform_int(1, 4), d = gen.uniform_int(1, 6);
    const CovOp a = gen.covariance(d);
    const Vector h = gen.vector(m), g = gen.vector(m), x = gen.vector(d), y = gen.vector(d);
    const SeqVec f = gen.seqvec({m, d}), fg = gen.seqvec({m, d});
    const double s = std::max(1.0, h.norm() * g.norm() * x.norm() * y.norm());
    w.add(std::fabs(inner_l2(bullet(h, x), bullet(g, y)) - h.dot(g) * x.dot(y)) / s);
    w.add(std::fabs(inner_A(bullet(h, x), bullet(g, y), a) - h.dot(g) * a.inner(x, y)) / s);
    w.add((bracket(bullet(h, x), y) - x.dot(y) * h).cwiseAbs().maxCoeff() / s);
    w.add(std::fabs(inner_A(f, fg, a) - inner_l2(f, apply_extended(a, fg))) / std::max(1.0, f.norm() * fg.norm()));
  }
  return {w.result("core/bullet, bracket and (.,.)_A identities")};
}

const std::vector<Suite>& suites() {
  static const std::vector<Suite> s{
      {"core", {linalg_identity_checks, block_projection_checks, psd_checks, divergence_checks}},
      {"hermite", {hermite_checks}},
      {"wick", {wick_equivalence_checks}},
      {"measure", {wick_orthogonality_checks, measure_checks}},
      {"chaos", {condexp_checks}},
      {"closure", {closure_checks}},
  };
  return s;
}

std::vector<CheckResult> run_suite(const std::string& name, const Context& ctx) {
  std::vector<CheckResult> out;
  bool found = false;
  for (const auto& suite : suites()) {
    if (name != "all" && suite.name != name) continue;
    found = true;
    for (CheckGroup g : suite.groups) {
      try {
        auto r = g(ctx);
        out.insert(out.end(), r.begin(), r.end());
      } catch (const std::exception& e) {
        out.push_back({suite.name + "/<exception>", false, e.what()});
      }
    }
  }
  if (!found) throw ConfigError("--suite", "unknown suite '" + name + "'");
  return out;
}

}  // namespace seqgauss::verify
