#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracle.hpp"
#include "seqgauss/hermite.hpp"
#include "test_util.hpp"

using namespace seqgauss;
using seqgauss::testing::rel_err;

TEST_CASE("low-degree values") {
  for (double x : {-2.5, 0.0, 0.3, 7.0}) {
    CHECK(hermite_prob(0, x) == 1.0);
    CHECK(hermite_prob(1, x) == x);
    CHECK(hermite_phys(0, x) == 1.0);
  }
  // Closed sums: H_2 = x^2 - 1, H_3 = x^3 - 3x, Hh_2 = 4x^2 - 2.
  CHECK(oracle::hermite_prob_sum(2, 2.0) == 3.0);
  CHECK(oracle::hermite_prob_sum(3, 1.0) == -2.0);
  CHECK(oracle::hermite_phys_sum(2, 1.0) == 2.0);
  CHECK(hermite_prob(2, 2.0) == 3.0);
  CHECK(hermite_prob(3, 1.0) == -2.0);
  CHECK(hermite_phys(2, 1.0) == 2.0);
  CHECK_THROWS_AS(hermite_prob(-1, 0.0), PreconditionError);
}

TEST_CASE("recurrence agrees with the closed sum") {
  oracle::Generator gen(31);
  for (int n = 0; n <= 15; ++n) {
    for (int s = 0; s < 25; ++s) {
      const double x = gen.uniform(-5.0, 5.0);
      const double want = oracle::hermite_prob_sum(n, x);
      // Relative to the sum of absolute terms so that values near a root are not penalized.
      const double scale = std::max(1.0, oracle::hermite_prob_abs_sum(n, x));
      CHECK(std::fabs(hermite_prob(n, x) - want) <= 1e-12 * scale);
      const double pscale = std::max(1.0, oracle::hermite_phys_abs_sum(n, x));
      CHECK(std::fabs(hermite_phys(n, x) - oracle::hermite_phys_sum(n, x)) <= 1e-12 * pscale);
    }
  }
  const auto all = hermite_prob_all(12, 1.7);
  for (int n = 0; n <= 12; ++n) CHECK(all[n] == hermite_prob(n, 1.7));
}

TEST_CASE("cross-convention relations") {
  oracle::Generator gen(32);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = gen.uniform_int(0, 12);
    const double x = gen.uniform(-4.0, 4.0);
    const double lhs1 = hermite_prob(n, x);
    const double rhs1 = std::pow(2.0, -n / 2.0) * hermite_phys(n, x / std::sqrt(2.0));
    CHECK(std::fabs(lhs1 - rhs1) <= 1e-9 * std::max(1.0, oracle::hermite_prob_abs_sum(n, x)));
    const double lhs2 = hermite_phys(n, x);
    const double rhs2 = std::pow(2.0, n / 2.0) * hermite_prob(n, std::sqrt(2.0) * x);
    CHECK(std::fabs(lhs2 - rhs2) <= 1e-9 * std::max(1.0, oracle::hermite_phys_abs_sum(n, x)));
  }
}

TEST_CASE("binomial expansion") {
  oracle::Generator gen(33);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = gen.uniform_int(0, 10);
    const double theta = gen.uniform(0.0, 2.0 * M_PI);
    const double alpha = std::cos(theta), beta = std::sin(theta);
    const double x = gen.uniform(-3.0, 3.0), y = gen.uniform(-3.0, 3.0);
    double sum = 0.0, scale = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double t = oracle::binomial(n, k) * std::pow(alpha, k) * std::pow(beta, n - k) * hermite_prob(k, x) *
                       hermite_prob(n - k, y);
      sum += t;
      scale += std::fabs(t);
    }
    CHECK(std::fabs(hermite_prob(n, alpha * x + beta * y) - sum) <= 1e-9 * std::max(1.0, scale));
  }
  // 0^0 = 1 at the endpoints alpha = 1, beta = 0.
  for (int n = 0; n <= 6; ++n) {
    double sum = 0.0;
    for (int k = 0; k <= n; ++k) sum += oracle::binomial(n, k) * std::pow(1.0, k) * std::pow(0.0, n - k) *
                                         hermite_prob(k, 0.7) * hermite_prob(n - k, -1.1);
    CHECK(sum == doctest::Approx(hermite_prob(n, 0.7)));
  }
}

TEST_CASE("scaled Hermite matches s^n H_n(y/s)") {
  oracle::Generator gen(34);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = gen.uniform_int(0, 10);
    const double s = gen.uniform(0.1, 3.0), y = gen.uniform(-4.0, 4.0);
    const double want = std::pow(s, n) * hermite_prob(n, y / s);
    CHECK(rel_err(scaled_hermite(n, y, s * s), want, std::pow(s, n) * 10) < 1e-12);
  }
  CHECK(scaled_hermite(3, 2.0, 0.0) == 8.0);
}

TEST_CASE("Gauss-Hermite rule") {
  const auto rule = gauss_hermite_rule(kDefaultQuadratureOrder);
  REQUIRE(rule->order() == 40);
  CHECK(std::all_of(rule->weights.begin(), rule->weights.end(), [](double w) { return w > 0.0; }));
  CHECK(std::fabs(std::accumulate(rule->weights.begin(), rule->weights.end(), 0.0) - 1.0) < 1e-12);
  CHECK(std::fabs(gh_expectation([](double x) { return x * x; }) - 1.0) < 1e-10);
  CHECK(gauss_hermite_rule(40).get() == rule.get());
  CHECK_THROWS_AS(gauss_hermite_rule(0), PreconditionError);

  for (int order : {1, 2, 5, 11}) {
    const auto r = gauss_hermite_rule(order);
    // Exact through degree 2*order - 1: E[x^{2j}] = (2j-1)!!.
    for (int j = 0; 2 * j <= 2 * order - 1; ++j) {
      double dfact = 1.0;
      for (int i = 2 * j - 1; i > 1; i -= 2) dfact *= i;
      CHECK(gh_expectation([j](double x) { return std::pow(x, 2 * j); }, order) == doctest::Approx(dfact).epsilon(1e-12));
    }
  }
}

TEST_CASE("orthogonality under the standard Gaussian") {
  for (int n = 0; n <= 10; ++n) {
    for (int m = 0; m <= 10; ++m) {
      const double v = gh_expectation([&](double x) { return hermite_prob(n, x) * hermite_prob(m, x); });
      CHECK(std::fabs(v - (n == m ? oracle::factorial(n) : 0.0)) < 1e-8);
    }
    if (n >= 1) CHECK(std::fabs(gh_expectation([&](double x) { return hermite_prob(n, x); })) < 1e-10);
  }
  for (int n = 11; n <= 12; ++n) {
    const double v = gh_expectation([&](double x) { return hermite_prob(n, x) * hermite_prob(n, x); });
    CHECK(v == doctest::Approx(oracle::factorial(n)).epsilon(1e-12));
  }
}
