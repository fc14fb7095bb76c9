#include "shehu/tf_expr.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "shehu/error.hpp"
#include "shehu/format.hpp"
#include "shehu/laurent.hpp"

namespace shehu {

namespace {

double snap(double v) {
  double r = std::round(v);
  return std::abs(v - r) < 1e-12 ? r : v;
}

Exponent snap(Exponent e) { return {snap(e.value), snap(e.alpha)}; }

Exponent mul(Exponent a, Exponent b) {
  if (a.alpha == 0) return a.value * b;
  if (b.alpha == 0) return b.value * a;
  fail(ErrorKind::Algebra, "exponents quadratic in alpha are not supported");
}

double numeric_pow(double base, Exponent e) {
  if (!e.is_numeric()) fail(ErrorKind::Algebra, "a numeric coefficient cannot carry a symbolic exponent");
  return std::pow(base, e.value);
}

bool can_pull(double x, Exponent e) { return e.is_numeric() && (x > 0 || e.is_integer()); }

// Appends the normalized factors of base^e and returns the numeric
// coefficient split off in the process.
double normalize(TFBase b, Exponent e, std::vector<TFFactor>& out) {
  e = snap(e);
  if (e.is_zero()) return 1.0;
  switch (b.kind) {
    case BaseKind::Linear: {
      if (b.x == 0 && b.y == 0) fail(ErrorKind::Algebra, "transform factor with zero coefficients");
      if (b.x == 0) {
        if (b.y == 1 || !can_pull(b.y, e)) {
          out.push_back({b, e});
          return 1.0;
        }
        out.push_back({TFBase::mate(b.pair), e});
        return numeric_pow(b.y, e);
      }
      if (b.x != 1 && can_pull(b.x, e)) {
        out.push_back({TFBase::linear(b.pair, 1, b.y / b.x), e});
        return numeric_pow(b.x, e);
      }
      out.push_back({b, e});
      return 1.0;
    }
    case BaseKind::Quadratic: {
      if (b.z == 0) return normalize(TFBase::linear(b.pair, 1, b.y), 2 * e, out);
      b.z = std::abs(b.z);
      b.x = 1;
      out.push_back({b, e});
      return 1.0;
    }
    case BaseKind::MittagLeffler: {
      if (b.x == 0) fail(ErrorKind::Algebra, "Mittag-Leffler denominator without its parameter");
      if (b.c == 0)
        return normalize(TFBase::linear(b.pair, b.x, b.y), mul(b.order, e), out) *
               normalize(TFBase::mate(b.pair), -mul(b.order, e), out);
      if (b.order.is_numeric() && b.order.value == 1)
        return normalize(TFBase::linear(b.pair, b.x, b.y - b.c), e, out) * normalize(TFBase::mate(b.pair), -e, out);
      if (b.order.is_numeric() && b.order.value == 2 && (e.is_numeric() || std::abs(b.x) == 1)) {
        double k = normalize(TFBase::mate(b.pair), -2 * e, out);
        if (b.c < 0) {
          TFBase q = TFBase::quadratic(b.pair, b.y / b.x, std::sqrt(-b.c) / std::abs(b.x));
          return k * normalize(q, e, out) * (std::abs(b.x) == 1 ? 1.0 : numeric_pow(b.x * b.x, e));
        }
        const double rc = std::sqrt(b.c);
        return k * normalize(TFBase::linear(b.pair, b.x, b.y - rc), e, out) *
               normalize(TFBase::linear(b.pair, b.x, b.y + rc), e, out);
      }
      if (b.order.is_numeric() && b.x != 1 && b.x > 0 && e.is_numeric()) {
        const double xg = std::pow(b.x, b.order.value);
        out.push_back({TFBase::mittag_leffler(b.pair, 1, b.y / b.x, b.order, b.c / xg), e});
        return std::pow(xg, e.value);
      }
      out.push_back({b, e});
      return 1.0;
    }
    case BaseKind::Exponential: {
      if (!e.is_numeric()) fail(ErrorKind::Algebra, "exponential factor with a symbolic power");
      if (b.x * e.value != 0) out.push_back({TFBase::exponential(b.pair, b.x * e.value), Exponent::of(1)});
      return 1.0;
    }
  }
  return 1.0;
}

bool canonicalize_term(TFTerm& t) {
  if (!std::isfinite(t.coeff)) fail(ErrorKind::Domain, "non-finite coefficient in transform expression");
  if (t.coeff == 0) return false;
  std::vector<TFFactor> raw;
  for (const TFFactor& f : t.factors) t.coeff *= normalize(f.base, f.power, raw);
  std::array<double, 4> shift{};
  std::map<TFBase, Exponent> merged;
  for (const TFFactor& f : raw) {
    if (f.base.kind == BaseKind::Exponential) shift[f.base.pair] += f.base.x;
    else merged[f.base] = merged[f.base] + f.power;
  }
  t.factors.clear();
  for (auto& [b, e] : merged) {
    Exponent s = snap(e);
    if (!s.is_zero()) t.factors.push_back({b, s});
  }
  for (int i = 0; i < 4; ++i)
    if (shift[i] != 0) t.factors.push_back({TFBase::exponential(i, shift[i]), Exponent::of(1)});
  std::sort(t.factors.begin(), t.factors.end());
  return t.coeff != 0;
}

std::vector<TFTerm> canonicalize(std::vector<TFTerm> terms) {
  std::vector<TFTerm> kept;
  for (TFTerm& t : terms)
    if (canonicalize_term(t)) kept.push_back(std::move(t));
  std::stable_sort(kept.begin(), kept.end(), [](const TFTerm& a, const TFTerm& b) { return a.factors < b.factors; });
  std::vector<TFTerm> out;
  for (TFTerm& t : kept) {
    if (!out.empty() && out.back().factors == t.factors) out.back().coeff += t.coeff;
    else out.push_back(std::move(t));
  }
  std::erase_if(out, [](const TFTerm& t) { return t.coeff == 0; });
  return out;
}

std::string pair_ratio(int pair) { return std::string("(") + param_char(pair) + "/" + mate_char(pair) + ")"; }

std::string linear_text(int pair, double x, double y) {
  std::string s;
  if (x != 0) {
    if (x == -1) s += "-";
    else if (x != 1) s += format_number(x) + "*";
    s += param_char(pair);
  }
  if (y != 0) {
    if (y < 0) s += "-";
    else if (!s.empty()) s += "+";
    if (std::abs(y) != 1) s += format_number(std::abs(y)) + "*";
    s += mate_char(pair);
  }
  return s;
}

std::string power_suffix(Exponent e) {
  if (e == Exponent::of(1)) return "";
  return "^" + to_string(e);
}

}  // namespace

bool Exponent::is_integer() const { return alpha == 0 && value == std::floor(value); }

std::string to_string(const Exponent& e) {
  if (e.alpha == 0) {
    std::string s = format_number(e.value);
    return e.value < 0 ? "(" + s + ")" : s;
  }
  std::string s;
  if (e.alpha == -1) s = "-alpha";
  else if (e.alpha == 1) s = "alpha";
  else s = format_number(e.alpha) + "*alpha";
  if (e.value > 0) s += "+" + format_number(e.value);
  else if (e.value < 0) s += "-" + format_number(-e.value);
  return s == "alpha" ? s : "(" + s + ")";
}

double TFBase::eval(const ShehuPoint& pt, double alpha_value) const {
  const double P = pt.param[pair], M = pt.mate[pair];
  switch (kind) {
    case BaseKind::Linear: return x * P + y * M;
    case BaseKind::Quadratic: return (P + y * M) * (P + y * M) + z * z * M * M;
    case BaseKind::MittagLeffler: {
      const double u = (x * P + y * M) / M;
      if (u < 0) fail(ErrorKind::Domain, "negative base under a fractional power");
      return std::pow(u, order.at(alpha_value)) - c;
    }
    case BaseKind::Exponential: return std::exp(-x * P / M);
  }
  return 0;
}

std::string TFBase::to_string() const {
  const char P = param_char(pair), M = mate_char(pair);
  switch (kind) {
    case BaseKind::Linear:
      if (is_param()) return std::string(1, P);
      if (is_mate()) return std::string(1, M);
      return "(" + linear_text(pair, x, y) + ")";
    case BaseKind::Quadratic: {
      std::string head = y == 0 ? std::string(1, P) + "^2" : "(" + linear_text(pair, 1, y) + ")^2";
      double z2 = z * z;
      return "(" + head + "+" + (z2 == 1 ? "" : format_number(z2) + "*") + M + "^2)";
    }
    case BaseKind::MittagLeffler: {
      std::string ratio = (x == 1 && y == 0) ? pair_ratio(pair) : "((" + linear_text(pair, x, y) + ")/" + M + ")";
      std::string s = "(" + ratio + "^" + shehu::to_string(order);
      s += c < 0 ? "+" + format_number(-c) : "-" + format_number(c);
      return s + ")";
    }
    case BaseKind::Exponential: {
      std::string s = "exp(";
      if (x > 0) s += "-";
      if (std::abs(x) != 1) s += format_number(std::abs(x)) + "*";
      return s + P + "/" + M + ")";
    }
  }
  return "?";
}

// ---- TFExpr ----

TFExpr::TFExpr(std::vector<TFTerm> terms) : terms_(canonicalize(std::move(terms))) {}

TFExpr TFExpr::constant(double c) { return TFExpr({TFTerm{c, {}}}); }

TFExpr TFExpr::factor(TFBase base, Exponent power, double coeff) {
  return TFExpr({TFTerm{coeff, {TFFactor{base, power}}}});
}

TFExpr TFExpr::ratio_power(int pair, Exponent e) {
  return TFExpr({TFTerm{1.0, {TFFactor{TFBase::param(pair), e}, TFFactor{TFBase::mate(pair), -e}}}});
}

bool TFExpr::has_alpha() const {
  for (const TFTerm& t : terms_)
    for (const TFFactor& f : t.factors)
      if (!f.power.is_numeric() || !f.base.order.is_numeric()) return true;
  return false;
}

VarSet TFExpr::pairs() const {
  VarSet s;
  for (const TFTerm& t : terms_)
    for (const TFFactor& f : t.factors) s = s.with(var_at(f.base.pair));
  return s;
}

double TFExpr::eval(const ShehuPoint& pt, std::optional<double> alpha_value) const {
  pt.validate();
  if (has_alpha() && !alpha_value) fail(ErrorKind::Usage, "expression contains alpha but no alpha value was given");
  const double a = alpha_value.value_or(0.0);
  double sum = 0;
  for (const TFTerm& t : terms_) {
    double v = t.coeff;
    for (const TFFactor& f : t.factors) {
      const double b = f.base.eval(pt, a);
      const double e = f.power.at(a);
      if (b == 0) {
        if (e < 0) fail(ErrorKind::Pole, "factor " + f.base.to_string() + " vanishes at " + pt.to_string());
        v = 0;
        continue;
      }
      if (b < 0 && e != std::floor(e))
        fail(ErrorKind::Domain, "negative base " + f.base.to_string() + " under a fractional power");
      v *= e == 1 ? b : std::pow(b, e);
    }
    sum += v;
  }
  return sum;
}

TFExpr TFExpr::bind_alpha(double alpha_value) const {
  std::vector<TFTerm> out = terms_;
  for (TFTerm& t : out)
    for (TFFactor& f : t.factors) {
      f.power = Exponent::of(f.power.at(alpha_value));
      f.base.order = Exponent::of(f.base.order.at(alpha_value));
    }
  return TFExpr(std::move(out));
}

TFExpr TFExpr::substitute(int pair, double kappa, double sigma) const {
  std::vector<TFTerm> out;
  for (const TFTerm& t : terms_) {
    TFTerm r{t.coeff, {}};
    for (TFFactor f : t.factors) {
      TFBase& b = f.base;
      if (b.pair != pair) {
        r.factors.push_back(f);
        continue;
      }
      switch (b.kind) {
        case BaseKind::Linear:
        case BaseKind::MittagLeffler:
          b.y = b.x * sigma + b.y;
          b.x = b.x * kappa;
          break;
        case BaseKind::Quadratic:
          if (kappa != 1) r.coeff *= numeric_pow(kappa * kappa, f.power);
          b.y = (sigma + b.y) / kappa;
          b.z = b.z / std::abs(kappa);
          break;
        case BaseKind::Exponential:
          r.coeff *= std::exp(-b.x * sigma * f.power.value);
          b.x = b.x * kappa;
          break;
      }
      r.factors.push_back(f);
    }
    out.push_back(std::move(r));
  }
  return TFExpr(std::move(out));
}

TFExpr TFExpr::d_param(int pair) const {
  std::vector<TFTerm> out;
  for (const TFTerm& t : terms_) {
    for (std::size_t i = 0; i < t.factors.size(); ++i) {
      const TFFactor& f = t.factors[i];
      const TFBase& b = f.base;
      if (b.pair != pair || b.is_mate()) continue;
      if (!f.power.is_numeric() || !b.order.is_numeric())
        fail(ErrorKind::Algebra, "bind alpha before differentiating with respect to a parameter");
      const double e = f.power.value;
      TFTerm r{t.coeff, t.factors};
      r.factors[i].power = Exponent::of(e - 1);
      switch (b.kind) {
        case BaseKind::Linear: r.coeff *= e * b.x; break;
        case BaseKind::Quadratic:
          r.coeff *= 2 * e;
          r.factors.push_back({TFBase::linear(pair, 1, b.y), Exponent::of(1)});
          break;
        case BaseKind::MittagLeffler: {
          const double g = b.order.value;
          r.coeff *= e * g * b.x;
          r.factors.push_back({TFBase::linear(pair, b.x, b.y), Exponent::of(g - 1)});
          r.factors.push_back({TFBase::mate(pair), Exponent::of(-g)});
          break;
        }
        case BaseKind::Exponential:
          r.factors[i].power = f.power;
          r.coeff *= -b.x;
          r.factors.push_back({TFBase::mate(pair), Exponent::of(-1)});
          break;
      }
      out.push_back(std::move(r));
    }
  }
  return TFExpr(std::move(out));
}

TFExpr TFExpr::inverse_of_term() const {
  if (terms_.size() != 1) fail(ErrorKind::Algebra, "only a single-term transform expression can be inverted");
  TFTerm r{1.0 / terms_[0].coeff, {}};
  for (TFFactor f : terms_[0].factors) {
    if (f.base.kind == BaseKind::Exponential) f.base.x = -f.base.x;
    else f.power = -f.power;
    r.factors.push_back(f);
  }
  return TFExpr({r});
}

std::string TFExpr::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const TFTerm& t : terms_) {
    std::vector<std::string> num, den;
    std::set<std::size_t> used;
    const auto& fs = t.factors;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (!fs[i].base.is_param() || fs[i].power.is_integer()) continue;
      for (std::size_t j = 0; j < fs.size(); ++j) {
        if (used.count(j) || !fs[j].base.is_mate() || fs[j].base.pair != fs[i].base.pair) continue;
        if (fs[j].power != -fs[i].power) continue;
        Exponent e = fs[i].power;
        int pair = fs[i].base.pair;
        if (e.is_numeric() && e.value < 0)
          num.push_back(std::string("(") + mate_char(pair) + "/" + param_char(pair) + ")" + power_suffix(-e));
        else
          num.push_back(pair_ratio(pair) + power_suffix(e));
        used.insert(i);
        used.insert(j);
        break;
      }
    }
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (used.count(i)) continue;
      const TFFactor& f = fs[i];
      if (f.base.kind != BaseKind::Exponential && f.power.is_numeric() && f.power.value < 0)
        den.push_back(f.base.to_string() + power_suffix(-f.power));
      else
        num.push_back(f.base.to_string() + power_suffix(f.power));
    }
    const double c = t.coeff;
    if (c < 0) out += "-";
    else if (!out.empty()) out += "+";
    const double a = std::abs(c);
    std::string body;
    if (a != 1 || num.empty()) body = format_number(a);
    for (const std::string& s : num) body += (body.empty() ? "" : "*") + s;
    if (den.size() == 1) body += "/" + den[0];
    else if (!den.empty()) {
      body += "/(";
      for (std::size_t i = 0; i < den.size(); ++i) body += (i ? "*" : "") + den[i];
      body += ")";
    }
    out += body;
  }
  return out;
}

TFExpr operator+(const TFExpr& a, const TFExpr& b) {
  std::vector<TFTerm> t = a.terms_;
  t.insert(t.end(), b.terms_.begin(), b.terms_.end());
  return TFExpr(std::move(t));
}
TFExpr operator-(const TFExpr& a) { return -1.0 * a; }
TFExpr operator-(const TFExpr& a, const TFExpr& b) { return a + (-b); }
TFExpr operator*(double k, const TFExpr& a) {
  std::vector<TFTerm> t = a.terms_;
  for (TFTerm& x : t) x.coeff *= k;
  return TFExpr(std::move(t));
}
TFExpr operator*(const TFExpr& a, const TFExpr& b) {
  std::vector<TFTerm> out;
  for (const TFTerm& x : a.terms_)
    for (const TFTerm& y : b.terms_) {
      TFTerm t{x.coeff * y.coeff, x.factors};
      t.factors.insert(t.factors.end(), y.factors.begin(), y.factors.end());
      out.push_back(std::move(t));
    }
  return TFExpr(std::move(out));
}

TFExpr pow(const TFExpr& x, Exponent e) {
  if (x.terms().size() == 1) {
    const TFTerm& t = x.terms()[0];
    TFTerm r{1.0, {}};
    if (t.coeff != 1) r.coeff = numeric_pow(t.coeff, e);
    if (!std::isfinite(r.coeff)) fail(ErrorKind::Algebra, "negative coefficient under a fractional power");
    for (TFFactor f : t.factors) {
      if (f.base.kind == BaseKind::Exponential) {
        if (!e.is_numeric()) fail(ErrorKind::Algebra, "exponential factor with a symbolic power");
        f.base.x *= e.value;
      } else {
        f.power = mul(f.power, e);
      }
      r.factors.push_back(f);
    }
    return TFExpr({r});
  }
  if (e.is_integer() && e.value >= 0) {
    TFExpr out = TFExpr::constant(1);
    for (int i = 0; i < static_cast<int>(e.value); ++i) out = out * x;
    return out;
  }
  fail(ErrorKind::Algebra, "non-integer power of a sum is outside the transform algebra");
}

bool canonical_equal(const TFExpr& x, const TFExpr& y, double rel_tol) {
  RationalContext ctx;
  Denominator den;
  auto nums = ctx.over_common_denominator({x, y}, den);
  const double scale = std::max(nums[0].max_abs(), nums[1].max_abs());
  if (scale == 0) return true;
  return (nums[0] - nums[1]).max_abs() <= rel_tol * scale;
}

}  // namespace shehu
