#pragma once

#include <functional>

#include "shehu/expr.hpp"

namespace shehu {

double gamma(double x);
double log_gamma(double x);  // log|Gamma(x)|

struct MLParams {
  double gamma = 1;
  double beta = 1;
  double z = 0;
};

inline constexpr double kMLMaxAbsArgument = 10.0;
inline constexpr double kMLMinIndex = 0.3;
inline constexpr int kMLMaxTerms = 200;

// E_{gamma,beta}(z) by its Taylor series. Throws Domain outside the supported
// domain or when rounding in the alternating series would exceed 1e-10
// relative.
double mittag_leffler(const MLParams& p, double term_tol = 1e-16);
inline double mittag_leffler(double g, double b, double z) { return mittag_leffler({g, b, z}); }

struct FracSpec {
  double alpha = 0.5;
  Var var = Var::t;
  int n() const;  // ceil(alpha), n = alpha for integer alpha
};

inline constexpr int kJacobiNodes = 64;

// Riemann-Liouville integral of f in spec.var at the point.
double rl_integral(const Expr& f, double alpha, Var var, const Point4& point,
                   int nodes = kJacobiNodes);
// Same for a callable g(tau) ~ tau^leading_exponent * smooth near 0.
double rl_integral(const std::function<double(double)>& g, double alpha, double x,
                   double leading_exponent = 0, int nodes = kJacobiNodes);
// Caputo derivative of order spec.alpha in spec.var at the point.
double caputo(const Expr& f, const FracSpec& spec, const Point4& point, int nodes = kJacobiNodes);

}  // namespace shehu
