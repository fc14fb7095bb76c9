#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "shehu/tf_expr.hpp"

namespace shehu {

// Generalized monomial in the eight transform parameters: real (possibly
// alpha-dependent) exponents, exp(-x P/M) shifts per pair, and integer powers
// of opaque factors. Exponents are stored quantized so that keys compare
// exactly.
struct Monomial {
  static constexpr int kOpaqueSlots = 8;
  std::array<std::int64_t, 16> power{};  // [2*i] value, [2*i+1] alpha; i = h j k l m n o p
  std::array<std::int64_t, 4> shift{};
  std::array<std::int32_t, kOpaqueSlots> opaque{};

  Monomial operator*(const Monomial& o) const;
  Monomial inverse() const;
  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

std::int64_t quantize(double v);
double dequantize(std::int64_t v);

class LaurentPoly {
 public:
  using Map = std::map<Monomial, double>;

  LaurentPoly() = default;
  static LaurentPoly constant(double c);
  static LaurentPoly monomial(const Monomial& m, double c = 1.0);

  const Map& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  double max_abs() const;
  void add(const Monomial& m, double c);
  // Removes terms with |coeff| <= tol.
  void prune(double tol);

  friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b);
  friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b);
  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);
  friend LaurentPoly operator*(double k, const LaurentPoly& a);
  LaurentPoly pow(int k) const;

 private:
  Map terms_;
};

// Exact division n / d if the quotient is a finite Laurent polynomial.
std::optional<LaurentPoly> divide_exact(const LaurentPoly& n, const LaurentPoly& d,
                                        double rel_tol = 1e-11);

// Product of compound bases raised to positive integer powers.
using Denominator = std::map<TFBase, int>;

// Converts transform-domain expressions to numerator/denominator form over a
// shared opaque-symbol table.
class RationalContext {
 public:
  // Writes every expression over one common denominator.
  std::vector<LaurentPoly> over_common_denominator(const std::vector<TFExpr>& xs, Denominator& den);
  // Polynomial expansion of a compound base, if it has one.
  std::optional<LaurentPoly> expand(const TFBase& b) const;
  // Inverse conversion of numerator / den.
  TFExpr to_tf(const LaurentPoly& numerator, const Denominator& den) const;

 private:
  int intern(const TFBase& b, Exponent e, int& sign);
  std::vector<std::pair<TFBase, Exponent>> opaque_;
};

}  // namespace shehu
