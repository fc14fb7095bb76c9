#include "shehu/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "shehu/error.hpp"

namespace shehu {

namespace {

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the monic
// recurrence, weights mu0 * (first eigenvector component)^2.
GaussRule build_jacobi(int n, double a, double b) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  const double ab = a + b;
  for (int k = 0; k < n; ++k) {
    double alpha_k = k == 0 ? (b - a) / (ab + 2) : (b * b - a * a) / ((2 * k + ab) * (2 * k + ab + 2));
    J(k, k) = alpha_k;
    if (k + 1 < n) {
      const int m = k + 1;
      double beta_m = m == 1 ? 4 * (1 + a) * (1 + b) / ((2 + ab) * (2 + ab) * (3 + ab))
                             : 4.0 * m * (m + a) * (m + b) * (m + ab) /
                                   ((2 * m + ab) * (2 * m + ab) * (2 * m + ab + 1) * (2 * m + ab - 1));
      J(k, m) = J(m, k) = std::sqrt(beta_m);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double log_mu0 =
      (ab + 1) * std::log(2.0) + std::lgamma(a + 1) + std::lgamma(b + 1) - std::lgamma(ab + 2);
  const double mu0 = std::exp(log_mu0);
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.x[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    rule.w[i] = v0 * v0;
  }
  // Eigenvectors are unit vectors only to rounding; normalizing makes the
  // zeroth moment exact.
  double total = 0;
  for (double w : rule.w) total += w;
  for (double& w : rule.w) w *= mu0 / total;
  return rule;
}

}  // namespace

const GaussRule& gauss_jacobi(int n, double a, double b) {
  if (n < 1) fail(ErrorKind::Usage, "quadrature needs at least one node");
  if (!(a > -1) || !(b > -1)) fail(ErrorKind::Domain, "Gauss-Jacobi exponents must exceed -1");
  static std::mutex mu;
  static std::map<std::tuple<int, double, double>, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(n, a, b);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_jacobi(n, a, b)).first;
  return it->second;  // std::map nodes are stable
}

}  // namespace shehu
