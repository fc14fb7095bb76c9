#include "shehu/special.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "shehu/error.hpp"
#include "shehu/format.hpp"
#include "shehu/quadrature.hpp"

namespace shehu {

namespace {

constexpr double kMLRoundingLimit = 1e-10;

void check_gamma_arg(double x) {
  if (!std::isfinite(x)) fail(ErrorKind::Domain, "gamma of a non-finite argument");
  if (x <= 0 && x == std::floor(x)) fail(ErrorKind::Pole, "gamma has a pole at " + format_number(x));
}

// (1 - v^{1/g}) / (1 - v), the smooth factor left after tau = x v^{1/g}.
double rho(double v, double one_minus_v, double g) {
  if (g == 1) return 1.0;
  return -std::expm1(std::log(v) / g) / one_minus_v;
}

// int_0^x (x - tau)^a tau^e h(tau) dtau with tau = x v^{1/g}.
template <class H>
double weighted_integral(double x, double a, double e, double g, H&& h, int nodes) {
  const double b = (e + 1) / g - 1;
  const GaussRule& rule = gauss_jacobi(nodes, a, b);
  double sum = 0;
  for (int i = 0; i < nodes; ++i) {
    const double v = 0.5 * (1 + rule.x[i]);
    const double omv = 0.5 * (1 - rule.x[i]);
    const double tau = x * std::pow(v, 1 / g);
    double r = a == 0 ? 1.0 : std::pow(rho(v, omv, g), a);
    sum += rule.w[i] * r * h(tau);
  }
  return sum * std::pow(2.0, -(a + b + 1)) * std::pow(x, a + e + 1) / g;
}

// Applies the integral termwise, choosing the substitution from the term's
// power and Mittag-Leffler factors in var.
double kernel_integral(const Expr& f, double a, Var var, const Point4& point, int nodes) {
  const double x = point[index(var)];
  double total = 0;
  for (const Term& t : f.terms()) {
    double e = 0, g = 1;
    Term rest{t.coeff, {}};
    for (const Atom& atom : t.factors) {
      if (auto* p = std::get_if<Power>(&atom); p && p->var == var) {
        e = p->exponent;
        continue;
      }
      if (auto* m = std::get_if<MittagLeffler>(&atom); m && m->var == var) g = m->gamma;
      rest.factors.push_back(atom);
    }
    auto h = [&](double tau) {
      Point4 y = point;
      y[index(var)] = tau;
      double v = rest.coeff;
      for (const Atom& atom : rest.factors) v *= eval(atom, y);
      return v;
    };
    total += weighted_integral(x, a, e, g, h, nodes);
  }
  return total;
}

}  // namespace

double gamma(double x) {
  check_gamma_arg(x);
  return boost::math::tgamma(x);
}

double log_gamma(double x) {
  check_gamma_arg(x);
  return boost::math::lgamma(x);
}

double mittag_leffler(const MLParams& p, double term_tol) {
  if (!(p.gamma >= kMLMinIndex))
    fail(ErrorKind::Domain, "Mittag-Leffler index gamma = " + format_number(p.gamma) + " below the supported 0.3");
  if (!(p.beta > 0)) fail(ErrorKind::Domain, "Mittag-Leffler index beta must be positive");
  if (!(std::abs(p.z) <= kMLMaxAbsArgument))
    fail(ErrorKind::Domain, "Mittag-Leffler argument |z| = " + format_number(std::abs(p.z)) + " exceeds 10");
  if (p.z == 0) return 1.0 / gamma(p.beta);
  const double log_abs_z = std::log(std::abs(p.z));
  double sum = 0, abs_sum = 0;
  for (int k = 0; k < kMLMaxTerms; ++k) {
    const double arg = p.gamma * k + p.beta;
    double term;
    if (arg < 150) {
      term = std::pow(p.z, k) / boost::math::tgamma(arg);
    } else {
      term = std::exp(k * log_abs_z - boost::math::lgamma(arg));
      if (p.z < 0 && (k % 2)) term = -term;
    }
    sum += term;
    abs_sum += std::abs(term);
    // Stop once the next term is negligible; terms decay monotonically past
    // the peak, which lies before any term falls below the threshold.
    const double next_arg = arg + p.gamma;
    const double log_next = (k + 1) * log_abs_z - boost::math::lgamma(next_arg);
    if (std::exp(log_next) < term_tol * std::abs(sum) && next_arg > 2) {
      const double rounding = std::numeric_limits<double>::epsilon() * abs_sum * 2;
      if (rounding > kMLRoundingLimit * std::max(1.0, std::abs(sum)))
        fail(ErrorKind::Domain, "Mittag-Leffler series cancellation exceeds double precision at z = " +
                                    format_number(p.z) + " (gamma = " + format_number(p.gamma) + ")");
      return sum;
    }
  }
  fail(ErrorKind::Domain, "Mittag-Leffler series did not converge within 200 terms at z = " + format_number(p.z));
}

int FracSpec::n() const { return static_cast<int>(std::ceil(alpha)); }

double rl_integral(const Expr& f, double alpha, Var var, const Point4& point, int nodes) {
  if (!(alpha > 0)) fail(ErrorKind::Usage, "fractional order must be positive");
  const double x = point[index(var)];
  if (x < 0) fail(ErrorKind::Domain, "integration variable must be nonnegative");
  if (x == 0) return 0;
  return kernel_integral(f, alpha - 1, var, point, nodes) / gamma(alpha);
}

double rl_integral(const std::function<double(double)>& g, double alpha, double x, double leading_exponent,
                   int nodes) {
  if (!(alpha > 0)) fail(ErrorKind::Usage, "fractional order must be positive");
  if (x < 0) fail(ErrorKind::Domain, "integration variable must be nonnegative");
  if (x == 0) return 0;
  auto h = [&](double tau) { return g(tau) / std::pow(tau, leading_exponent); };
  return weighted_integral(x, alpha - 1, leading_exponent, 1.0, h, nodes) / gamma(alpha);
}

double caputo(const Expr& f, const FracSpec& spec, const Point4& point, int nodes) {
  if (!(spec.alpha > 0)) fail(ErrorKind::Usage, "fractional order must be positive");
  const int n = spec.n();
  const Expr dn = f.derivative(spec.var, n);
  if (spec.alpha == n) return dn.eval(point);
  if (!(point[index(spec.var)] > 0)) fail(ErrorKind::Domain, "Caputo derivative needs a positive variable");
  return kernel_integral(dn, n - spec.alpha - 1, spec.var, point, nodes) / gamma(n - spec.alpha);
}

}  // namespace shehu
