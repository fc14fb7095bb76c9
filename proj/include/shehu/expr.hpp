#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "shehu/vars.hpp"

namespace shehu {

// a*q + b*r + c*s + d*t
struct LinearForm {
  std::array<double, 4> coeff{};

  double operator[](Var v) const { return coeff[index(v)]; }
  double& operator[](Var v) { return coeff[index(v)]; }
  double eval(const Point4& x) const;
  bool is_zero() const;
  VarSet support() const;
  LinearForm scaled(double k) const;
  LinearForm& operator+=(const LinearForm& o);
  friend bool operator==(const LinearForm&, const LinearForm&) = default;
  friend auto operator<=>(const LinearForm&, const LinearForm&) = default;
};

struct Power {  // var^exponent, exponent > -1
  Var var;
  double exponent;
  friend bool operator==(const Power&, const Power&) = default;
};
struct Exponential {  // exp(form)
  LinearForm form;
  friend bool operator==(const Exponential&, const Exponential&) = default;
};
struct Sine {
  LinearForm form;
  friend bool operator==(const Sine&, const Sine&) = default;
};
struct Cosine {
  LinearForm form;
  friend bool operator==(const Cosine&, const Cosine&) = default;
};
struct MittagLeffler {  // E_{gamma,beta}(c * var^gamma)
  double gamma;
  double beta;
  double c;
  Var var;
  friend bool operator==(const MittagLeffler&, const MittagLeffler&) = default;
};
struct Heaviside {  // product over vars of U(v - shift[v])
  std::array<double, 4> shift{};
  VarSet vars;
  friend bool operator==(const Heaviside&, const Heaviside&) = default;
};

using Atom = std::variant<Power, Exponential, Sine, Cosine, MittagLeffler, Heaviside>;

int kind_rank(const Atom& a);
VarSet support(const Atom& a);
double eval(const Atom& a, const Point4& x);
std::string to_string(const Atom& a);

struct Term {
  double coeff = 1.0;
  std::vector<Atom> factors;
  friend bool operator==(const Term&, const Term&) = default;
};

// Function-domain expression: canonical sum of coefficient * atom products.
class Expr {
 public:
  Expr() = default;
  explicit Expr(std::vector<Term> terms);
  static Expr constant(double c);
  static Expr atom(Atom a, double coeff = 1.0);
  static Expr var(Var v) { return atom(Power{v, 1.0}); }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  double constant_value() const;  // requires is_constant()
  VarSet variables() const;

  double eval(const Point4& x) const;
  Expr derivative(Var v, int order = 1) const;
  // Right limit f(..., v -> 0+, ...).
  Expr at_zero(Var v) const;
  // f(q - a, r - b, s - c, t - d); the sign of a shift is unrestricted.
  Expr shifted(const std::array<double, 4>& shift) const;
  // f(a q, b r, c s, d t) for positive factors.
  Expr scaled(const std::array<double, 4>& factor) const;
  std::string to_string() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator*(double k, const Expr& a);
  friend bool operator==(const Expr&, const Expr&) = default;

 private:
  std::vector<Term> terms_;
};

// Structural equality of canonical forms with relative tolerance on numbers.
bool canonical_equal(const Expr& x, const Expr& y, double rel_tol = 1e-12);

inline constexpr double kPolynomialSlack = 1e-3;

// Exponential-order certificate |f| <= M exp(a q + b r + c s + d t) on the
// positive orthant.
struct GrowthBound {
  double M = 0;
  std::array<double, 4> rate{};
};

GrowthBound growth_bound(const Expr& x);

}  // namespace shehu
