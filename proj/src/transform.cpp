#include "shehu/transform.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>

#include "shehu/error.hpp"
#include "shehu/special.hpp"

namespace shehu {

namespace {

using cd = std::complex<double>;

double neg(double a) { return a == 0 ? 0.0 : -a; }

double binomial(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

TFExpr mate_power(int pair, double e) { return TFExpr::factor(TFBase::mate(pair), Exponent::of(e)); }

// ---- forward ----

// Complex-valued transform expression re + i*im.
struct CTF {
  TFExpr re;
  TFExpr im;
};

CTF operator*(const CTF& a, const CTF& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

CTF scaled(cd c, const CTF& x) {
  return {c.real() * x.re - c.imag() * x.im, c.real() * x.im + c.imag() * x.re};
}

struct VarAtoms {
  double rate = 0;      // real part of the exponential rate
  double power = 0;     // exponent of the monomial
  const MittagLeffler* ml = nullptr;
};

// Image of v^n exp((a + i w) v) [times a Mittag-Leffler factor] for one pair.
CTF axis_image(int pair, const VarAtoms& va, double w) {
  const double a = va.rate;
  const TFBase shifted = TFBase::linear(pair, 1, neg(a));
  if (va.ml) {
    if (w != 0) fail(ErrorKind::Untransformable, "Mittag-Leffler factor combined with an oscillatory factor");
    const MittagLeffler& m = *va.ml;
    if (std::abs(va.power - (m.beta - 1)) > 1e-12 * std::max(1.0, std::abs(m.beta)))
      fail(ErrorKind::Untransformable, "Mittag-Leffler factor requires the companion power var^(beta-1)");
    TFExpr img = TFExpr::factor(shifted, Exponent::of(m.gamma - m.beta)) * mate_power(pair, m.beta - m.gamma) *
                 TFExpr::factor(TFBase::mittag_leffler(pair, 1, neg(a), Exponent::of(m.gamma), m.c), Exponent::of(-1));
    return {img, {}};
  }
  const double n = va.power;
  if (w == 0) {
    TFExpr img = TFExpr::factor(shifted, Exponent::of(-(n + 1)), gamma(n + 1)) * mate_power(pair, n + 1);
    return {img, {}};
  }
  if (n != std::floor(n)) fail(ErrorKind::Untransformable, "non-integer power combined with an oscillatory factor");
  // 1/(A - i w M)^(n+1) = (A + i w M)^(n+1) / Q^(n+1), Q = A^2 + w^2 M^2
  const int k1 = static_cast<int>(n) + 1;
  const TFExpr common = TFExpr::factor(TFBase::quadratic(pair, neg(a), std::abs(w)), Exponent::of(-k1), factorial(k1 - 1)) *
                        mate_power(pair, k1);
  CTF sum;
  for (int k = 0; k <= k1; ++k) {
    TFExpr part = TFExpr::factor(shifted, Exponent::of(k1 - k), binomial(k1, k) * std::pow(w, k)) * mate_power(pair, k);
    switch (k % 4) {
      case 0: sum.re = sum.re + part; break;
      case 1: sum.im = sum.im + part; break;
      case 2: sum.re = sum.re - part; break;
      default: sum.im = sum.im - part; break;
    }
  }
  return {common * sum.re, common * sum.im};
}

TFExpr forward_plain(const Term& t, VarSet vars) {
  std::array<VarAtoms, 4> axes{};
  std::vector<const Atom*> trig;
  for (const Atom& a : t.factors) {
    if (auto* p = std::get_if<Power>(&a)) axes[index(p->var)].power += p->exponent;
    else if (auto* e = std::get_if<Exponential>(&a))
      for (Var v : kVars) axes[index(v)].rate += e->form[v];
    else if (auto* m = std::get_if<MittagLeffler>(&a)) axes[index(m->var)].ml = m;
    else trig.push_back(&a);
  }
  // Components joined by trig atoms over several variables.
  std::array<int, 4> root{0, 1, 2, 3};
  auto find = [&](int i) {
    while (root[i] != i) i = root[i];
    return i;
  };
  for (const Atom* a : trig) {
    auto vs = support(*a).vars();
    for (std::size_t i = 1; i < vs.size(); ++i) root[find(index(vs[i]))] = find(index(vs[0]));
  }
  TFExpr out = TFExpr::constant(t.coeff);
  for (int c = 0; c < 4; ++c) {
    if (find(c) != c) continue;
    VarSet comp;
    for (int i = 0; i < 4; ++i)
      if (find(i) == c) comp = comp.with(var_at(i));
    comp = comp & vars;
    if (comp.empty()) continue;
    // Complex-exponential expansion of the component's trig atoms.
    std::vector<std::pair<cd, LinearForm>> waves{{1.0, LinearForm{}}};
    for (const Atom* a : trig) {
      const LinearForm* form = nullptr;
      bool sine = false;
      if (auto* s = std::get_if<Sine>(a)) form = &s->form, sine = true;
      else form = &std::get<Cosine>(*a).form;
      if (!form->support().subset_of(comp)) continue;
      std::vector<std::pair<cd, LinearForm>> next;
      const cd up = sine ? cd(0, -0.5) : cd(0.5, 0), down = sine ? cd(0, 0.5) : cd(0.5, 0);
      for (const auto& [k, w] : waves) {
        LinearForm plus = w, minus = w;
        plus += *form;
        minus += form->scaled(-1);
        next.emplace_back(k * up, plus);
        next.emplace_back(k * down, minus);
      }
      waves = std::move(next);
    }
    CTF total;
    for (const auto& [k, w] : waves) {
      CTF prod{TFExpr::constant(1), {}};
      for (Var v : comp.vars()) prod = prod * axis_image(index(v), axes[index(v)], w[v]);
      CTF s = scaled(k, prod);
      total.re = total.re + s.re;
      total.im = total.im + s.im;
    }
    out = out * total.re;
  }
  return out;
}

TFExpr forward_term(const Term& t, VarSet vars) {
  VarSet used;
  for (const Atom& a : t.factors) used = used | support(a);
  if (!used.subset_of(vars))
    fail(ErrorKind::Untransformable, "term depends on " + (used - vars).to_string() + " outside the transform variables");
  for (std::size_t i = 0; i < t.factors.size(); ++i) {
    if (auto* h = std::get_if<Heaviside>(&t.factors[i])) {
      Term rest = t;
      rest.factors.erase(rest.factors.begin() + static_cast<std::ptrdiff_t>(i));
      std::array<double, 4> back{};
      for (int k = 0; k < 4; ++k) back[k] = -h->shift[k];
      Expr g = Expr({rest}).shifted(back);
      return heaviside_shift(forward(g, vars), h->shift);
    }
  }
  return forward_plain(t, vars);
}

// ---- inverse ----

using CPoly = std::vector<cd>;  // ascending coefficients

cd ipow(cd x, int k) {
  cd r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

CPoly poly_mul(const CPoly& a, const CPoly& b) {
  CPoly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

CPoly poly_pow(const CPoly& a, int k) {
  CPoly r{1.0};
  for (int i = 0; i < k; ++i) r = poly_mul(r, a);
  return r;
}

struct Pole {
  cd root;
  int mult;
};

// Taylor coefficients of N(root + u) / prod_{other} (u + root - other)^mult,
// up to order `terms - 1`.
std::vector<cd> local_series(const CPoly& num, const std::vector<Pole>& poles, std::size_t self, int terms) {
  const cd rho = poles[self].root;
  std::vector<cd> s(terms, 0.0);
  for (int j = 0; j < terms; ++j)
    for (std::size_t k = j; k < num.size(); ++k) s[j] += num[k] * binomial(static_cast<int>(k), j) * ipow(rho, static_cast<int>(k) - j);
  for (std::size_t p = 0; p < poles.size(); ++p) {
    if (p == self) continue;
    const cd d = rho - poles[p].root;
    const int mu = poles[p].mult;
    std::vector<cd> f(terms);
    for (int j = 0; j < terms; ++j)
      f[j] = (j % 2 ? -1.0 : 1.0) * binomial(mu + j - 1, j) / ipow(d, mu + j);
    std::vector<cd> r(terms, 0.0);
    for (int i = 0; i < terms; ++i)
      for (int j = 0; i + j < terms; ++j) r[i + j] += s[i] * f[j];
    s = std::move(r);
  }
  return s;
}

Expr axis_exp_trig(Var v, double coeff, int power, double a, double b, bool sine) {
  Term t{coeff, {}};
  if (power > 0) t.factors.push_back(Power{v, static_cast<double>(power)});
  if (a != 0) {
    LinearForm f;
    f[v] = a;
    t.factors.push_back(Exponential{f});
  }
  if (b != 0) {
    LinearForm f;
    f[v] = b;
    if (sine) t.factors.push_back(Sine{f});
    else t.factors.push_back(Cosine{f});
  }
  return Expr({t});
}

double base_degree(const TFBase& b) { return b.kind == BaseKind::Quadratic ? 2 : b.kind == BaseKind::Linear ? 1 : 0; }

[[noreturn]] void no_inverse(const std::string& why) { fail(ErrorKind::NoClosedFormInverse, why); }

// Inverts the factors of one pair (degree-0 in P, M) to a function of v.
Expr invert_axis(Var v, const std::vector<TFFactor>& fs) {
  double degree = 0;
  const TFFactor* ml = nullptr;
  bool fractional = false;
  for (const TFFactor& f : fs) {
    degree += base_degree(f.base) * f.power.value;
    if (f.base.kind == BaseKind::MittagLeffler) ml = &f;
    else if (!f.power.is_integer()) fractional = true;
  }
  if (std::abs(degree) > 1e-12) no_inverse("factor in pair " + std::string(1, var_char(v)) + " is not homogeneous of degree 0");
  if (ml) {
    const TFBase& d = ml->base;
    if (ml->power != Exponent::of(-1) || d.x != 1 || !d.order.is_numeric())
      no_inverse("unrecognized Mittag-Leffler pattern");
    const double g = d.order.value;
    double e = 0;  // power of (P + yM)
    for (const TFFactor& f : fs) {
      if (&f == ml || f.base.is_mate()) continue;
      if (f.base.kind != BaseKind::Linear || f.base.x != 1 || f.base.y != d.y) no_inverse("unrecognized Mittag-Leffler pattern");
      e = f.power.value;
    }
    const double beta = g - e;
    if (!(beta > 0)) no_inverse("Mittag-Leffler pattern with non-positive second index");
    Term t{1.0, {MittagLeffler{g, beta, d.c, v}}};
    if (beta != 1) t.factors.push_back(Power{v, beta - 1});
    Expr out({t});
    return d.y == 0 ? out : out * axis_exp_trig(v, 1.0, 0, neg(d.y), 0, false);
  }
  if (fractional) {
    const TFFactor* lin = nullptr;
    for (const TFFactor& f : fs) {
      if (f.base.is_mate()) continue;
      if (lin || f.base.kind != BaseKind::Linear || f.base.x != 1) no_inverse("unrecognized fractional-power pattern");
      lin = &f;
    }
    const double nu = -lin->power.value;
    if (!(nu > 0)) no_inverse("fractional power with non-negative exponent");
    Expr out({Term{1.0 / gamma(nu), {Power{v, nu - 1}}}});
    return lin->base.y == 0 ? out : out * axis_exp_trig(v, 1.0, 0, neg(lin->base.y), 0, false);
  }
  // Rational in s = P/M: partial fractions over complex poles.
  CPoly num{1.0};
  std::vector<Pole> poles;
  int den_degree = 0;
  for (const TFFactor& f : fs) {
    const TFBase& b = f.base;
    if (b.is_mate()) continue;
    const int k = static_cast<int>(f.power.value);
    if (b.kind == BaseKind::Linear) {
      if (b.x != 1) no_inverse("unnormalized linear factor");
      if (k > 0) num = poly_mul(num, poly_pow({b.y, 1.0}, k));
      else poles.push_back({-b.y, -k}), den_degree -= k;
    } else if (b.kind == BaseKind::Quadratic) {
      if (k > 0) num = poly_mul(num, poly_pow({b.y * b.y + b.z * b.z, 2 * b.y, 1.0}, k));
      else {
        poles.push_back({cd(-b.y, b.z), -k});
        poles.push_back({cd(-b.y, -b.z), -k});
        den_degree -= 2 * k;
      }
    } else {
      no_inverse("unrecognized factor " + b.to_string());
    }
  }
  if (static_cast<int>(num.size()) - 1 >= den_degree) no_inverse("improper rational factor in pair " + std::string(1, var_char(v)));
  Expr out;
  for (std::size_t p = 0; p < poles.size(); ++p) {
    const cd rho = poles[p].root;
    if (rho.imag() < 0) continue;
    const int mu = poles[p].mult;
    auto s = local_series(num, poles, p, mu);
    for (int k = 1; k <= mu; ++k) {
      const cd A = s[mu - k] / factorial(k - 1);
      if (rho.imag() == 0) {
        out = out + axis_exp_trig(v, A.real(), k - 1, rho.real(), 0, false);
      } else {
        out = out + axis_exp_trig(v, 2 * A.real(), k - 1, rho.real(), rho.imag(), false);
        out = out + axis_exp_trig(v, -2 * A.imag(), k - 1, rho.real(), rho.imag(), true);
      }
    }
  }
  return out;
}

Expr invert_term(const TFTerm& t) {
  std::array<std::vector<TFFactor>, 4> by_pair;
  std::array<double, 4> shift{};
  for (const TFFactor& f : t.factors) {
    if (f.base.kind == BaseKind::Exponential) shift[f.base.pair] += f.base.x * f.power.value;
    else by_pair[f.base.pair].push_back(f);
  }
  Expr out = Expr::constant(t.coeff);
  Heaviside step;
  for (int i = 0; i < 4; ++i) {
    if (by_pair[i].empty()) {
      if (shift[i] != 0) no_inverse("exponential factor without a transform kernel");
      continue;
    }
    Expr g = invert_axis(var_at(i), by_pair[i]);
    if (shift[i] < 0) no_inverse("exponential factor with a negative shift");
    if (shift[i] > 0) {
      std::array<double, 4> s{};
      s[i] = shift[i];
      try {
        g = g.shifted(s);
      } catch (const Error&) {
        no_inverse("shifted image outside the function algebra");
      }
      step.vars = step.vars.with(var_at(i));
      step.shift[i] = shift[i];
    }
    out = out * g;
  }
  if (!step.vars.empty()) out = out * Expr::atom(step);
  return out;
}

// Drops round-off terms and snaps coefficients that are integers up to noise.
Expr clean(const Expr& g) {
  double scale = 0;
  for (const Term& t : g.terms()) scale = std::max(scale, std::abs(t.coeff));
  std::vector<Term> out;
  for (Term t : g.terms()) {
    if (std::abs(t.coeff) <= 1e-12 * scale) continue;
    const double r = std::round(t.coeff);
    if (std::abs(t.coeff - r) <= 1e-10 * std::max(1.0, std::abs(r))) t.coeff = r;
    out.push_back(std::move(t));
  }
  return Expr(std::move(out));
}

}  // namespace

// ---- traces and regions ----

Expr BoundaryTrace::apply(const Expr& f) const {
  Expr g = f;
  for (Var v : vars.vars()) g = g.derivative(v, order[index(v)]).at_zero(v);
  return g;
}

std::string BoundaryTrace::to_string() const {
  std::string s = "f";
  std::string sub;
  for (Var v : vars.vars()) sub += std::string(order[index(v)], var_char(v));
  if (!sub.empty()) s += "_" + sub;
  s += "(";
  for (Var v : kVars) {
    if (v != Var::q) s += ",";
    s += vars.contains(v) ? std::string("0") : std::string(1, var_char(v));
  }
  return s + ")";
}

bool ConvergenceRegion::contains(const ShehuPoint& pt) const {
  for (int i = 0; i < 4; ++i)
    if (!(pt.param[i] > rate[i] * pt.mate[i])) return false;
  return true;
}

// ---- forward and inverse ----

TFExpr forward(const Expr& f, VarSet vars) {
  TFExpr out;
  for (const Term& t : f.terms()) out = out + forward_term(t, vars);
  return out;
}

Expr inverse(const TFExpr& F_in, std::optional<double> alpha_value) {
  TFExpr F = F_in;
  if (F.has_alpha()) {
    if (!alpha_value) fail(ErrorKind::Usage, "image contains alpha; a numeric value is required to invert it");
    F = F.bind_alpha(*alpha_value);
  }
  const VarSet pairs = F.pairs();
  Expr g;
  for (const TFTerm& t : F.terms()) {
    VarSet tp;
    for (const TFFactor& f : t.factors) tp = tp.with(var_at(f.base.pair));
    if (tp != pairs) no_inverse("terms of the image use different transform dimensions");
    g = g + invert_term(t);
  }
  g = clean(g);
  TFExpr back;
  try {
    back = forward(g, pairs);
  } catch (const Error& e) {
    no_inverse(std::string("candidate inverse is not transformable: ") + e.what());
  }
  if (!canonical_equal(back, F, 1e-9)) no_inverse("candidate inverse " + g.to_string() + " failed forward verification");
  return g;
}

// ---- rules ----

TFExpr scale_rule(const TFExpr& F, const std::array<double, 4>& factor) {
  TFExpr out = F;
  double jac = 1;
  for (int i = 0; i < 4; ++i) {
    if (!(factor[i] > 0)) fail(ErrorKind::Domain, "scale factors must be positive");
    if (factor[i] != 1) out = out.substitute(i, 1.0 / factor[i], 0);
    jac *= factor[i];
  }
  return (1.0 / jac) * out;
}

TFExpr shift_rule(const TFExpr& F, const std::array<double, 4>& rate) {
  TFExpr out = F;
  for (int i = 0; i < 4; ++i) {
    if (!std::isfinite(rate[i])) fail(ErrorKind::Domain, "shift rates must be finite");
    if (rate[i] != 0) out = out.substitute(i, 1, -rate[i]);
  }
  return out;
}

TFExpr heaviside_shift(const TFExpr& F, const std::array<double, 4>& shift) {
  TFExpr k = TFExpr::constant(1);
  for (int i = 0; i < 4; ++i) {
    if (!(shift[i] >= 0)) fail(ErrorKind::Domain, "Heaviside shifts must be nonnegative");
    if (shift[i] > 0) k = k * TFExpr::factor(TFBase::exponential(i, shift[i]));
  }
  return k * F;
}

namespace {

// Shared expansion for integer and Caputo rules: per active variable v with
// order e_v (possibly symbolic) and n_v trace orders, the product of
// (s^e F - sum_m s^(e-m-1) trace_m) over the active variables.
RuleResult product_rule(const std::vector<std::pair<Var, Exponent>>& ops, const std::vector<int>& trace_counts) {
  RuleResult r;
  r.principal = TFExpr::constant(1);
  for (const auto& [v, e] : ops) r.principal = r.principal * TFExpr::ratio_power(index(v), e);
  const int k = static_cast<int>(ops.size());
  std::vector<int> masks(1 << k);
  std::iota(masks.begin(), masks.end(), 0);
  std::stable_sort(masks.begin(), masks.end(),
                   [](int a, int b) { return std::popcount(unsigned(a)) < std::popcount(unsigned(b)); });
  for (int mask : masks) {
    if (mask == 0) continue;
    std::vector<int> traced;
    for (int i = 0; i < k; ++i)
      if (mask >> i & 1) traced.push_back(i);
    const double sign = traced.size() % 2 ? 1.0 : -1.0;
    // Enumerate trace orders m_i in [0, n_i) for traced operators.
    std::vector<int> m(traced.size(), 0);
    while (true) {
      TFExpr coeff = TFExpr::constant(sign);
      BoundaryTrace tr;
      for (int i = 0; i < k; ++i) {
        const auto& [v, e] = ops[i];
        auto it = std::find(traced.begin(), traced.end(), i);
        if (it == traced.end()) {
          coeff = coeff * TFExpr::ratio_power(index(v), e);
        } else {
          const int mi = m[it - traced.begin()];
          coeff = coeff * TFExpr::ratio_power(index(v), e - Exponent::of(mi + 1));
          tr.vars = tr.vars.with(v);
          tr.order[index(v)] = mi;
        }
      }
      r.boundary_terms.push_back({coeff, tr});
      std::size_t j = 0;
      for (; j < m.size(); ++j) {
        if (++m[j] < trace_counts[traced[j]]) break;
        m[j] = 0;
      }
      if (j == m.size()) break;
    }
  }
  return r;
}

}  // namespace

RuleResult derivative_rule(const std::array<int, 4>& orders) {
  std::vector<std::pair<Var, Exponent>> ops;
  std::vector<int> counts;
  for (Var v : kVars) {
    const int n = orders[index(v)];
    if (n < 0) fail(ErrorKind::Usage, "derivative orders must be nonnegative");
    if (n == 0) continue;
    ops.emplace_back(v, Exponent::of(n));
    counts.push_back(n);
  }
  return product_rule(ops, counts);
}

RuleResult partial_rule(int n, Var var) {
  if (n < 1) fail(ErrorKind::Usage, "partial derivative order must be positive");
  std::array<int, 4> orders{};
  orders[index(var)] = n;
  return derivative_rule(orders);
}

RuleResult mixed_rule() { return derivative_rule({1, 1, 1, 1}); }

RuleResult caputo_rule(double alpha, Var var, bool symbolic) {
  if (!(alpha > 0)) fail(ErrorKind::Domain, "Caputo order must be positive");
  const int n = FracSpec{alpha, var}.n();
  const Exponent e = symbolic ? Exponent{0, 1} : Exponent::of(alpha);
  return product_rule({{var, e}}, {n});
}

TFExpr multiply_by_powers_rule(const TFExpr& F, const std::array<int, 4>& n) {
  TFExpr out = F;
  int total = 0;
  for (int i = 0; i < 4; ++i) {
    if (n[i] < 0) fail(ErrorKind::Usage, "multiplier powers must be nonnegative");
    for (int k = 0; k < n[i]; ++k) out = out.d_param(i);
    if (n[i] > 0) out = mate_power(i, n[i]) * out;
    total += n[i];
  }
  return (total % 2 ? -1.0 : 1.0) * out;
}

TFExpr convolution(const TFExpr& Ff, const TFExpr& Fg) { return Ff * Fg; }

TFExpr apply_rule(const RuleResult& rule, const Expr& f, VarSet vars) {
  TFExpr out = rule.principal * forward(f, vars);
  for (const BoundaryTerm& b : rule.boundary_terms) {
    Expr tr = b.trace.apply(f);
    if (tr.is_zero()) continue;
    out = out - b.coeff * forward(tr, vars - b.trace.vars);
  }
  return out;
}

ExistenceBound existence_bound(const Expr& f, const ShehuPoint& pt) {
  pt.validate();
  GrowthBound g = growth_bound(f);
  ExistenceBound out{{g.rate}, 0};
  if (!out.region.contains(pt))
    fail(ErrorKind::OutsideRegion, "point " + pt.to_string() + " lies outside the convergence region");
  double b = g.M;
  for (int i = 0; i < 4; ++i) b *= pt.mate[i] / (pt.param[i] - g.rate[i] * pt.mate[i]);
  out.bound = b;
  return out;
}

}  // namespace shehu
