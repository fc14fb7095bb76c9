#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shehu/vars.hpp"

namespace shehu {

// value + alpha * (symbolic fractional order)
struct Exponent {
  double value = 0;
  double alpha = 0;

  static Exponent of(double v) { return {v, 0}; }
  bool is_numeric() const { return alpha == 0; }
  bool is_zero() const { return value == 0 && alpha == 0; }
  bool is_integer() const;
  double at(double alpha_value) const { return value + alpha * alpha_value; }
  Exponent operator-() const { return {-value, -alpha}; }
  friend Exponent operator+(Exponent a, Exponent b) { return {a.value + b.value, a.alpha + b.alpha}; }
  friend Exponent operator-(Exponent a, Exponent b) { return {a.value - b.value, a.alpha - b.alpha}; }
  friend Exponent operator*(double k, Exponent a) { return {k * a.value, k * a.alpha}; }
  friend bool operator==(const Exponent&, const Exponent&) = default;
  friend auto operator<=>(const Exponent&, const Exponent&) = default;
};

std::string to_string(const Exponent& e);

enum class BaseKind : std::uint8_t {
  Linear,         // x*P + y*M
  Quadratic,      // (P + y*M)^2 + z^2*M^2, z > 0
  MittagLeffler,  // ((x*P + y*M)/M)^order - c
  Exponential,    // exp(-x*P/M)
};

// One factor base bound to a transform pair (P, M) = (h..l, m..p)[pair].
struct TFBase {
  int pair = 0;
  BaseKind kind = BaseKind::Linear;
  double x = 0;
  double y = 0;
  double z = 0;
  Exponent order;
  double c = 0;

  static TFBase make(int pair, BaseKind kind, double x, double y = 0, double z = 0, Exponent order = {}, double c = 0) {
    return {pair, kind, x, y, z, order, c};
  }
  static TFBase param(int pair) { return make(pair, BaseKind::Linear, 1, 0); }
  static TFBase mate(int pair) { return make(pair, BaseKind::Linear, 0, 1); }
  static TFBase linear(int pair, double x, double y) { return make(pair, BaseKind::Linear, x, y); }
  static TFBase quadratic(int pair, double y, double z) { return make(pair, BaseKind::Quadratic, 1, y, z); }
  static TFBase mittag_leffler(int pair, double x, double y, Exponent order, double c) {
    return make(pair, BaseKind::MittagLeffler, x, y, 0, order, c);
  }
  static TFBase exponential(int pair, double x) { return make(pair, BaseKind::Exponential, x); }

  bool is_param() const { return kind == BaseKind::Linear && x == 1 && y == 0; }
  bool is_mate() const { return kind == BaseKind::Linear && x == 0 && y == 1; }
  double eval(const ShehuPoint& pt, double alpha_value) const;
  std::string to_string() const;
  friend bool operator==(const TFBase&, const TFBase&) = default;
  friend auto operator<=>(const TFBase&, const TFBase&) = default;
};

struct TFFactor {
  TFBase base;
  Exponent power;
  friend bool operator==(const TFFactor&, const TFFactor&) = default;
  friend auto operator<=>(const TFFactor&, const TFFactor&) = default;
};

struct TFTerm {
  double coeff = 1.0;
  std::vector<TFFactor> factors;
  friend bool operator==(const TFTerm&, const TFTerm&) = default;
};

// Transform-domain expression: canonical sum of coefficient * factor products.
class TFExpr {
 public:
  TFExpr() = default;
  explicit TFExpr(std::vector<TFTerm> terms);
  static TFExpr constant(double c);
  static TFExpr factor(TFBase base, Exponent power = Exponent::of(1), double coeff = 1.0);
  // (P/M)^e for the pair
  static TFExpr ratio_power(int pair, Exponent e);

  const std::vector<TFTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool has_alpha() const;
  // Bitmask of referenced pairs.
  VarSet pairs() const;

  double eval(const ShehuPoint& pt, std::optional<double> alpha_value = std::nullopt) const;
  TFExpr bind_alpha(double alpha_value) const;
  // Substitutes P -> kappa*P + sigma*M for the given pair.
  TFExpr substitute(int pair, double kappa, double sigma) const;
  // d/dP for the pair's first parameter; exponents must be numeric.
  TFExpr d_param(int pair) const;
  TFExpr inverse_of_term() const;  // 1/x for a single-term expression
  std::string to_string() const;

  friend TFExpr operator+(const TFExpr& a, const TFExpr& b);
  friend TFExpr operator-(const TFExpr& a, const TFExpr& b);
  friend TFExpr operator-(const TFExpr& a);
  friend TFExpr operator*(const TFExpr& a, const TFExpr& b);
  friend TFExpr operator*(double k, const TFExpr& a);
  friend bool operator==(const TFExpr&, const TFExpr&) = default;

 private:
  std::vector<TFTerm> terms_;
};

TFExpr pow(const TFExpr& x, Exponent e);

// Identity test: both sides over a common denominator, numerators expanded
// and compared coefficientwise with relative tolerance.
bool canonical_equal(const TFExpr& x, const TFExpr& y, double rel_tol = 1e-12);

}  // namespace shehu
