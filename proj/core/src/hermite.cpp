#include "seqgauss/hermite.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/Eigenvalues>

#include "seqgauss/errors.hpp"

namespace seqgauss {

namespace {

void require_degree(int n) {
  if (n < 0) throw PreconditionError("Hermite degree must be non-negative");
}

// Orthonormal Hermite functions psi_k = H_k / sqrt(k!) at x; returns (psi_{q-1}, psi_q).
std::pair<long double, long double> orthonormal_pair(int q, long double x) {
  long double prev = 0.0L;
  long double cur = 1.0L;
  for (int k = 0; k < q; ++k) {
    const long double next = (x * cur - std::sqrt(static_cast<long double>(k)) * prev) /
                             std::sqrt(static_cast<long double>(k + 1));
    prev = cur;
    cur = next;
  }
  return {prev, cur};
}

QuadratureRule build_rule(int q) {
  // Golub-Welsch for the initial nodes: symmetric Jacobi matrix with off-diagonal sqrt(k).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(q, q);
  for (int k = 1; k < q; ++k) {
    jacobi(k, k - 1) = std::sqrt(static_cast<double>(k));
    jacobi(k - 1, k) = jacobi(k, k - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi, Eigen::EigenvaluesOnly);

  QuadratureRule rule;
  rule.nodes.resize(q);
  rule.weights.resize(q);
  long double total = 0.0L;
  std::vector<long double> w(q);
  for (int i = 0; i < q; ++i) {
    long double x = es.eigenvalues()(i);
    // Newton polish on psi_q, with psi_q' = sqrt(q) psi_{q-1}.
    for (int it = 0; it < 8; ++it) {
      auto [pm1, p] = orthonormal_pair(q, x);
      const long double dx = p / (std::sqrt(static_cast<long double>(q)) * pm1);
      x -= dx;
      if (std::fabs(dx) <= 1e-19L * (1.0L + std::fabs(x))) break;
    }
    auto [pm1, p] = orthonormal_pair(q, x);
    (void)p;
    w[i] = 1.0L / (static_cast<long double>(q) * pm1 * pm1);
    total += w[i];
    rule.nodes[i] = static_cast<double>(x);
  }
  for (int i = 0; i < q; ++i) rule.weights[i] = static_cast<double>(w[i] / total);
  return rule;
}

}  // namespace

double hermite_prob(int n, double x) {
  require_degree(n);
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < n; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double hermite_phys(int n, double x) {
  require_degree(n);
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<double> hermite_prob_all(int max_n, double x) {
  require_degree(max_n);
  std::vector<double> h(static_cast<std::size_t>(max_n) + 1);
  h[0] = 1.0;
  if (max_n >= 1) h[1] = x;
  for (int k = 1; k < max_n; ++k) h[k + 1] = x * h[k] - k * h[k - 1];
  return h;
}

double scaled_hermite(int n, double y, double s2) {
  require_degree(n);
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = y;
  for (int k = 1; k < n; ++k) {
    const double next = y * cur - k * s2 * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::shared_ptr<const QuadratureRule> gauss_hermite_rule(int order) {
  if (order < 1) throw PreconditionError("quadrature order must be >= 1");
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const QuadratureRule>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[order];
  if (!slot) slot = std::make_shared<const QuadratureRule>(build_rule(order));
  return slot;
}

double gh_expectation(const std::function<double(double)>& g, int order) {
  const auto rule = gauss_hermite_rule(order);
  long double acc = 0.0L;
  for (int i = 0; i < rule->order(); ++i) acc += static_cast<long double>(rule->weights[i]) * g(rule->nodes[i]);
  return static_cast<double>(acc);
}

}  // namespace seqgauss
