#pragma once

// Hermite polynomials in both normalizations and Gauss-Hermite quadrature for the
// standard Gaussian measure on R.

#include <functional>
#include <memory>
#include <vector>

namespace seqgauss {

// Probabilists' H_n: H_0 = 1, H_1 = x, H_{n+1} = x H_n - n H_{n-1}.
// Orthogonal under the standard normal density with (H_n, H_m) = n! delta_nm.
double hermite_prob(int n, double x);

// Physicists' convention: Hh_0 = 1, Hh_1 = 2x, Hh_{n+1} = 2x Hh_n - 2n Hh_{n-1}.
double hermite_phys(int n, double x);

// H_0(x), ..., H_{max_n}(x) in one sweep.
std::vector<double> hermite_prob_all(int max_n, double x);

// s^n H_n(y / s) with s = sqrt(s2), evaluated without dividing by s:
//   S_0 = 1, S_1 = y, S_{n+1} = y S_n - n s2 S_{n-1}.
// Well defined at s2 = 0, where it reduces to y^n.
double scaled_hermite(int n, double y, double s2);

// Gauss-Hermite rule normalized to the standard Gaussian probability measure.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // positive, summing to 1

  int order() const { return static_cast<int>(nodes.size()); }
};

inline constexpr int kDefaultQuadratureOrder = 40;

// Rules are computed once per order and cached; the returned rule is immutable.
std::shared_ptr<const QuadratureRule> gauss_hermite_rule(int order);

// Integral of g against the standard Gaussian; exact for polynomials of degree <= 2*order-1.
double gh_expectation(const std::function<double(double)>& g, int order = kDefaultQuadratureOrder);

}  // namespace seqgauss
