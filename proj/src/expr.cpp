#include "shehu/expr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "shehu/error.hpp"
#include "shehu/format.hpp"
#include "shehu/special.hpp"

namespace shehu {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kDropTol = 1e-14;

bool close(double a, double b, double rel_tol) {
  return std::abs(a - b) <= rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string format_linear(const LinearForm& f) {
  std::string out;
  for (Var v : kVars) {
    double c = f[v];
    if (c == 0) continue;
    if (c < 0) out += "-";
    else if (!out.empty()) out += "+";
    double a = std::abs(c);
    if (a != 1) out += format_number(a) + "*";
    out += var_char(v);
  }
  return out.empty() ? "0" : out;
}

// sin(-L) = -sin(L), cos(-L) = cos(L): first nonzero coefficient made positive.
bool normalize_sign(LinearForm& f) {
  for (double c : f.coeff) {
    if (c > 0) return false;
    if (c < 0) {
      f = f.scaled(-1);
      return true;
    }
  }
  return false;
}

int primary_var(const Atom& a) {
  VarSet s = support(a);
  for (Var v : kVars)
    if (s.contains(v)) return index(v);
  return 4;
}

bool atom_less(const Atom& a, const Atom& b) {
  if (kind_rank(a) != kind_rank(b)) return kind_rank(a) < kind_rank(b);
  if (primary_var(a) != primary_var(b)) return primary_var(a) < primary_var(b);
  return to_string(a) < to_string(b);
}

bool factors_less(const std::vector<Atom>& a, const std::vector<Atom>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), atom_less);
}

// Canonicalizes one term in place; returns false when it vanishes.
bool canonicalize_term(Term& t) {
  if (!std::isfinite(t.coeff)) fail(ErrorKind::Domain, "non-finite coefficient");
  if (t.coeff == 0) return false;
  std::array<double, 4> power{};
  std::array<bool, 4> has_power{};
  LinearForm exp_form;
  std::vector<Atom> trig;
  std::vector<MittagLeffler> ml;
  Heaviside step;
  for (const Atom& a : t.factors) {
    bool vanish = false;
    std::visit(overloaded{
                   [&](const Power& p) {
                     power[index(p.var)] += p.exponent;
                     has_power[index(p.var)] = true;
                   },
                   [&](const Exponential& e) { exp_form += e.form; },
                   [&](Sine s) {
                     if (s.form.is_zero()) vanish = true;
                     else {
                       if (normalize_sign(s.form)) t.coeff = -t.coeff;
                       trig.emplace_back(s);
                     }
                   },
                   [&](Cosine c) {
                     if (!c.form.is_zero()) {
                       normalize_sign(c.form);
                       trig.emplace_back(c);
                     }
                   },
                   [&](const MittagLeffler& m) {
                     if (!(m.gamma > 0) || !(m.beta > 0))
                       fail(ErrorKind::Algebra, "Mittag-Leffler indices must be positive");
                     if (m.c == 0) {
                       t.coeff /= gamma(m.beta);
                     } else if (m.gamma == 1 && m.beta == 1) {
                       exp_form[m.var] += m.c;
                     } else if (m.gamma == 2 && m.beta == 1 && m.c < 0) {
                       LinearForm f;
                       f[m.var] = std::sqrt(-m.c);
                       trig.emplace_back(Cosine{f});
                     } else {
                       ml.push_back(m);
                     }
                   },
                   [&](const Heaviside& h) {
                     for (Var v : h.vars.vars()) {
                       double a = h.shift[index(v)];
                       if (a <= 0) continue;  // U(v - a) = 1 on v > 0
                       if (!step.vars.contains(v) || a > step.shift[index(v)]) step.shift[index(v)] = a;
                       step.vars = step.vars.with(v);
                     }
                   },
               },
               a);
    if (vanish) return false;
  }
  std::vector<Atom> out;
  for (Var v : kVars) {
    int i = index(v);
    if (!has_power[i] || power[i] == 0) continue;
    if (!(power[i] > -1))
      fail(ErrorKind::Algebra, std::string("power of ") + var_char(v) + " must exceed -1, got " +
                                   format_number(power[i]));
    out.emplace_back(Power{v, power[i]});
  }
  if (!exp_form.is_zero()) out.emplace_back(Exponential{exp_form});
  for (std::size_t i = 0; i < trig.size(); ++i)
    for (std::size_t j = i + 1; j < trig.size(); ++j)
      if (trig[i].index() == trig[j].index() && !(support(trig[i]) & support(trig[j])).empty())
        fail(ErrorKind::Algebra, "repeated " + std::string(trig[i].index() == 2 ? "sine" : "cosine") +
                                     " factors over a shared variable are outside the algebra");
  for (auto& a : trig) out.push_back(a);
  for (std::size_t i = 0; i < ml.size(); ++i) {
    for (std::size_t j = i + 1; j < ml.size(); ++j)
      if (ml[i].var == ml[j].var)
        fail(ErrorKind::Algebra, "two Mittag-Leffler factors in one variable are outside the algebra");
    out.emplace_back(ml[i]);
  }
  if (!step.vars.empty()) {
    for (Var v : kVars)
      if (!step.vars.contains(v)) step.shift[index(v)] = 0;
    out.emplace_back(step);
  }
  std::sort(out.begin(), out.end(), atom_less);
  t.factors = std::move(out);
  return true;
}

std::vector<Term> canonicalize(std::vector<Term> terms) {
  std::vector<Term> kept;
  for (Term& t : terms)
    if (canonicalize_term(t)) kept.push_back(std::move(t));
  std::stable_sort(kept.begin(), kept.end(),
                   [](const Term& a, const Term& b) { return factors_less(a.factors, b.factors); });
  std::vector<Term> merged;
  for (Term& t : kept) {
    if (!merged.empty() && merged.back().factors == t.factors) merged.back().coeff += t.coeff;
    else merged.push_back(std::move(t));
  }
  std::vector<Term> out;
  for (Term& t : merged)
    if (t.coeff != 0) out.push_back(std::move(t));
  std::stable_sort(out.begin(), out.end(), [](const Term& a, const Term& b) {
    if (a.factors != b.factors) return factors_less(a.factors, b.factors);
    return a.coeff < b.coeff;
  });
  return out;
}

Term with_factors(const Term& t, double coeff, std::vector<Atom> extra, std::size_t skip_a = SIZE_MAX,
                  std::size_t skip_b = SIZE_MAX) {
  Term out{coeff, {}};
  for (std::size_t i = 0; i < t.factors.size(); ++i)
    if (i != skip_a && i != skip_b) out.factors.push_back(t.factors[i]);
  for (auto& a : extra) out.factors.push_back(std::move(a));
  return out;
}

// d/dv of a canonical term.
void differentiate_term(const Term& t, Var v, std::vector<Term>& out) {
  std::size_t ip = SIZE_MAX, im = SIZE_MAX;
  for (std::size_t i = 0; i < t.factors.size(); ++i) {
    if (auto* p = std::get_if<Power>(&t.factors[i]); p && p->var == v) ip = i;
    if (auto* m = std::get_if<MittagLeffler>(&t.factors[i]); m && m->var == v) im = i;
  }
  const double e = ip == SIZE_MAX ? 0.0 : std::get<Power>(t.factors[ip]).exponent;
  if (im != SIZE_MAX) {
    // v^e E_{g,b}(c v^g) = v^{e-b+1} [v^{b-1} E_{g,b}], and
    // d/dv [v^{b-1} E_{g,b}(c v^g)] = v^{b-2} E_{g,b-1}(c v^g).
    const MittagLeffler m = std::get<MittagLeffler>(t.factors[im]);
    const double k1 = e - m.beta + 1;
    if (std::abs(k1) > kDropTol)
      out.push_back(with_factors(t, t.coeff * k1, {Power{v, e - 1}, m}, ip, im));
    if (m.beta - 1 > kDropTol) {
      out.push_back(with_factors(t, t.coeff, {Power{v, e - 1}, MittagLeffler{m.gamma, m.beta - 1, m.c, v}}, ip, im));
    } else {
      // E_{g,b-1}(z) = 1/Gamma(b-1) + z E_{g,g+b-1}(z)
      const double bm1 = m.beta - 1;
      if (std::abs(bm1) > kDropTol)
        out.push_back(with_factors(t, t.coeff / gamma(bm1), {Power{v, e - 1}}, ip, im));
      if (!(m.gamma + bm1 > 0))
        fail(ErrorKind::Algebra, "derivative of the Mittag-Leffler factor leaves the atom algebra");
      out.push_back(with_factors(t, t.coeff * m.c,
                                 {Power{v, e - 1 + m.gamma}, MittagLeffler{m.gamma, m.gamma + bm1, m.c, v}}, ip, im));
    }
  } else if (ip != SIZE_MAX) {
    out.push_back(with_factors(t, t.coeff * e, {Power{v, e - 1}}, ip));
  }
  for (std::size_t i = 0; i < t.factors.size(); ++i) {
    if (i == ip || i == im) continue;
    std::visit(overloaded{
                   [&](const Power&) {},
                   [&](const MittagLeffler&) {},
                   [&](const Exponential& x) {
                     if (x.form[v] != 0) out.push_back(with_factors(t, t.coeff * x.form[v], {}));
                   },
                   [&](const Sine& x) {
                     if (x.form[v] != 0) out.push_back(with_factors(t, t.coeff * x.form[v], {Cosine{x.form}}, i));
                   },
                   [&](const Cosine& x) {
                     if (x.form[v] != 0) out.push_back(with_factors(t, -t.coeff * x.form[v], {Sine{x.form}}, i));
                   },
                   [&](const Heaviside& h) {
                     if (h.vars.contains(v))
                       fail(ErrorKind::Algebra, "derivative of a shifted step is a Dirac delta, outside the algebra");
                   },
               },
               t.factors[i]);
  }
}

double binomial(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

// ---- LinearForm ----

double LinearForm::eval(const Point4& x) const {
  return coeff[0] * x[0] + coeff[1] * x[1] + coeff[2] * x[2] + coeff[3] * x[3];
}
bool LinearForm::is_zero() const {
  return std::all_of(coeff.begin(), coeff.end(), [](double c) { return c == 0; });
}
VarSet LinearForm::support() const {
  VarSet s;
  for (Var v : kVars)
    if ((*this)[v] != 0) s = s.with(v);
  return s;
}
LinearForm LinearForm::scaled(double k) const {
  LinearForm f;
  for (int i = 0; i < 4; ++i) f.coeff[i] = k * coeff[i];
  return f;
}
LinearForm& LinearForm::operator+=(const LinearForm& o) {
  for (int i = 0; i < 4; ++i) coeff[i] += o.coeff[i];
  return *this;
}

// ---- Atoms ----

int kind_rank(const Atom& a) { return static_cast<int>(a.index()); }

VarSet support(const Atom& a) {
  return std::visit(overloaded{
                        [](const Power& p) { return VarSet::of(p.var); },
                        [](const Exponential& e) { return e.form.support(); },
                        [](const Sine& s) { return s.form.support(); },
                        [](const Cosine& c) { return c.form.support(); },
                        [](const MittagLeffler& m) { return VarSet::of(m.var); },
                        [](const Heaviside& h) { return h.vars; },
                    },
                    a);
}

double eval(const Atom& a, const Point4& x) {
  return std::visit(overloaded{
                        [&](const Power& p) { return std::pow(x[index(p.var)], p.exponent); },
                        [&](const Exponential& e) { return std::exp(e.form.eval(x)); },
                        [&](const Sine& s) { return std::sin(s.form.eval(x)); },
                        [&](const Cosine& c) { return std::cos(c.form.eval(x)); },
                        [&](const MittagLeffler& m) {
                          return mittag_leffler(m.gamma, m.beta, m.c * std::pow(x[index(m.var)], m.gamma));
                        },
                        [&](const Heaviside& h) {
                          for (Var v : h.vars.vars())
                            if (!(x[index(v)] > h.shift[index(v)])) return 0.0;
                          return 1.0;
                        },
                    },
                    a);
}

std::string to_string(const Atom& a) {
  return std::visit(overloaded{
                        [](const Power& p) {
                          std::string s(1, var_char(p.var));
                          if (p.exponent != 1) s += "^" + format_number(p.exponent);
                          return s;
                        },
                        [](const Exponential& e) { return "exp(" + format_linear(e.form) + ")"; },
                        [](const Sine& s) { return "sin(" + format_linear(s.form) + ")"; },
                        [](const Cosine& c) { return "cos(" + format_linear(c.form) + ")"; },
                        [](const MittagLeffler& m) {
                          std::string s = "ml(" + format_number(m.gamma);
                          if (m.beta != 1) s += "," + format_number(m.beta);
                          s += ";";
                          if (m.c == -1) s += "-";
                          else if (m.c != 1) s += format_number(m.c) + "*";
                          s += std::string(1, var_char(m.var)) + "^" + format_number(m.gamma) + ")";
                          return s;
                        },
                        [](const Heaviside& h) {
                          std::string s = "U(";
                          bool first = true;
                          for (Var v : h.vars.vars()) {
                            if (!first) s += ",";
                            first = false;
                            s += var_char(v);
                            if (h.shift[index(v)] != 0) s += "-" + format_number(h.shift[index(v)]);
                          }
                          return s + ")";
                        },
                    },
                    a);
}

// ---- Expr ----

Expr::Expr(std::vector<Term> terms) : terms_(canonicalize(std::move(terms))) {}

Expr Expr::constant(double c) { return Expr({Term{c, {}}}); }
Expr Expr::atom(Atom a, double coeff) { return Expr({Term{coeff, {std::move(a)}}}); }

bool Expr::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].factors.empty()); }
double Expr::constant_value() const { return terms_.empty() ? 0.0 : terms_[0].coeff; }

VarSet Expr::variables() const {
  VarSet s;
  for (const Term& t : terms_)
    for (const Atom& a : t.factors) s = s | support(a);
  return s;
}

double Expr::eval(const Point4& x) const {
  double sum = 0;
  for (const Term& t : terms_) {
    double v = t.coeff;
    for (const Atom& a : t.factors) v *= shehu::eval(a, x);
    sum += v;
  }
  return sum;
}

Expr Expr::derivative(Var v, int order) const {
  if (order < 0) fail(ErrorKind::Usage, "negative derivative order");
  Expr cur = *this;
  for (int k = 0; k < order; ++k) {
    std::vector<Term> out;
    for (const Term& t : cur.terms_) differentiate_term(t, v, out);
    cur = Expr(std::move(out));
  }
  return cur;
}

Expr Expr::at_zero(Var v) const {
  std::vector<Term> out;
  for (const Term& t : terms_) {
    Term r{t.coeff, {}};
    bool vanish = false;
    for (const Atom& a : t.factors) {
      std::visit(overloaded{
                     [&](const Power& p) {
                       if (p.var != v) r.factors.push_back(p);
                       else if (p.exponent > 0) vanish = true;
                       else fail(ErrorKind::Domain, std::string("trace at ") + var_char(v) + " = 0 is singular");
                     },
                     [&](Exponential e) {
                       e.form[v] = 0;
                       r.factors.push_back(e);
                     },
                     [&](Sine s) {
                       s.form[v] = 0;
                       r.factors.push_back(s);
                     },
                     [&](Cosine c) {
                       c.form[v] = 0;
                       r.factors.push_back(c);
                     },
                     [&](const MittagLeffler& m) {
                       if (m.var == v) r.coeff /= gamma(m.beta);
                       else r.factors.push_back(m);
                     },
                     [&](const Heaviside& h) {
                       if (h.vars.contains(v)) vanish = true;
                       else r.factors.push_back(h);
                     },
                 },
                 a);
    }
    if (!vanish) out.push_back(std::move(r));
  }
  return Expr(std::move(out));
}

Expr Expr::shifted(const std::array<double, 4>& shift) const {
  std::vector<Term> result;
  for (const Term& t : terms_) {
    std::vector<Term> parts{Term{t.coeff, {}}};
    auto multiply = [&](const std::vector<std::pair<double, std::vector<Atom>>>& alternatives) {
      std::vector<Term> next;
      for (const Term& p : parts)
        for (const auto& [c, atoms] : alternatives) {
          if (c == 0) continue;
          Term n{p.coeff * c, p.factors};
          n.factors.insert(n.factors.end(), atoms.begin(), atoms.end());
          next.push_back(std::move(n));
        }
      parts = std::move(next);
    };
    for (const Atom& a : t.factors) {
      std::visit(overloaded{
                     [&](const Power& p) {
                       double a0 = shift[index(p.var)];
                       if (a0 == 0) return multiply({{1.0, {p}}});
                       double n = p.exponent;
                       if (n != std::floor(n) || n < 0)
                         fail(ErrorKind::Algebra, "a non-integer power cannot be shifted within the algebra");
                       int ni = static_cast<int>(n);
                       std::vector<std::pair<double, std::vector<Atom>>> alts;
                       for (int k = 0; k <= ni; ++k) {
                         double c = binomial(ni, k) * std::pow(-a0, ni - k);
                         alts.push_back({c, k ? std::vector<Atom>{Power{p.var, double(k)}} : std::vector<Atom>{}});
                       }
                       multiply(alts);
                     },
                     [&](const Exponential& e) {
                       double phi = 0;
                       for (int i = 0; i < 4; ++i) phi += e.form.coeff[i] * shift[i];
                       multiply({{std::exp(-phi), {e}}});
                     },
                     [&](const Sine& s) {
                       double phi = 0;
                       for (int i = 0; i < 4; ++i) phi += s.form.coeff[i] * shift[i];
                       multiply({{std::cos(phi), {s}}, {-std::sin(phi), {Cosine{s.form}}}});
                     },
                     [&](const Cosine& c) {
                       double phi = 0;
                       for (int i = 0; i < 4; ++i) phi += c.form.coeff[i] * shift[i];
                       multiply({{std::cos(phi), {c}}, {std::sin(phi), {Sine{c.form}}}});
                     },
                     [&](const MittagLeffler& m) {
                       if (shift[index(m.var)] != 0)
                         fail(ErrorKind::Algebra, "a Mittag-Leffler factor cannot be shifted within the algebra");
                       multiply({{1.0, {m}}});
                     },
                     [&](Heaviside h) {
                       for (Var v : h.vars.vars()) h.shift[index(v)] += shift[index(v)];
                       multiply({{1.0, {h}}});
                     },
                 },
                 a);
    }
    result.insert(result.end(), parts.begin(), parts.end());
  }
  return Expr(std::move(result));
}

Expr Expr::scaled(const std::array<double, 4>& factor) const {
  for (double k : factor)
    if (!(k > 0)) fail(ErrorKind::Usage, "scale factors must be positive");
  std::vector<Term> out;
  for (const Term& t : terms_) {
    Term r{t.coeff, {}};
    for (const Atom& a : t.factors) {
      std::visit(overloaded{
                     [&](const Power& p) {
                       r.coeff *= std::pow(factor[index(p.var)], p.exponent);
                       r.factors.push_back(p);
                     },
                     [&](Exponential e) {
                       for (int i = 0; i < 4; ++i) e.form.coeff[i] *= factor[i];
                       r.factors.push_back(e);
                     },
                     [&](Sine s) {
                       for (int i = 0; i < 4; ++i) s.form.coeff[i] *= factor[i];
                       r.factors.push_back(s);
                     },
                     [&](Cosine c) {
                       for (int i = 0; i < 4; ++i) c.form.coeff[i] *= factor[i];
                       r.factors.push_back(c);
                     },
                     [&](MittagLeffler m) {
                       m.c *= std::pow(factor[index(m.var)], m.gamma);
                       r.factors.push_back(m);
                     },
                     [&](Heaviside h) {
                       for (int i = 0; i < 4; ++i) h.shift[i] /= factor[i];
                       r.factors.push_back(h);
                     },
                 },
                 a);
    }
    out.push_back(std::move(r));
  }
  return Expr(std::move(out));
}

std::string Expr::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const Term& t : terms_) {
    double c = t.coeff;
    if (c < 0) out += "-";
    else if (!out.empty()) out += "+";
    double a = std::abs(c);
    std::string body;
    for (const Atom& f : t.factors) body += (body.empty() ? "" : "*") + shehu::to_string(f);
    if (body.empty()) out += format_number(a);
    else if (a == 1) out += body;
    else out += format_number(a) + "*" + body;
  }
  return out;
}

Expr operator+(const Expr& a, const Expr& b) {
  std::vector<Term> t = a.terms_;
  t.insert(t.end(), b.terms_.begin(), b.terms_.end());
  return Expr(std::move(t));
}
Expr operator-(const Expr& a) { return -1.0 * a; }
Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }
Expr operator*(double k, const Expr& a) {
  std::vector<Term> t = a.terms_;
  for (Term& x : t) x.coeff *= k;
  return Expr(std::move(t));
}
Expr operator*(const Expr& a, const Expr& b) {
  std::vector<Term> out;
  for (const Term& x : a.terms_)
    for (const Term& y : b.terms_) {
      Term t{x.coeff * y.coeff, x.factors};
      t.factors.insert(t.factors.end(), y.factors.begin(), y.factors.end());
      out.push_back(std::move(t));
    }
  return Expr(std::move(out));
}

namespace {

bool atoms_close(const Atom& a, const Atom& b, double tol) {
  if (a.index() != b.index()) return false;
  auto forms_close = [&](const LinearForm& x, const LinearForm& y) {
    for (int i = 0; i < 4; ++i)
      if (!close(x.coeff[i], y.coeff[i], tol)) return false;
    return true;
  };
  return std::visit(overloaded{
                        [&](const Power& x) {
                          const auto& y = std::get<Power>(b);
                          return x.var == y.var && close(x.exponent, y.exponent, tol);
                        },
                        [&](const Exponential& x) { return forms_close(x.form, std::get<Exponential>(b).form); },
                        [&](const Sine& x) { return forms_close(x.form, std::get<Sine>(b).form); },
                        [&](const Cosine& x) { return forms_close(x.form, std::get<Cosine>(b).form); },
                        [&](const MittagLeffler& x) {
                          const auto& y = std::get<MittagLeffler>(b);
                          return x.var == y.var && close(x.gamma, y.gamma, tol) && close(x.beta, y.beta, tol) &&
                                 close(x.c, y.c, tol);
                        },
                        [&](const Heaviside& x) {
                          const auto& y = std::get<Heaviside>(b);
                          if (x.vars != y.vars) return false;
                          for (int i = 0; i < 4; ++i)
                            if (!close(x.shift[i], y.shift[i], tol)) return false;
                          return true;
                        },
                    },
                    a);
}

}  // namespace

bool canonical_equal(const Expr& x, const Expr& y, double rel_tol) {
  const auto& a = x.terms();
  const auto& b = y.terms();
  std::vector<bool> used(b.size(), false);
  if (a.size() != b.size()) return false;
  // Near-equal parameters may sort differently, so match terms as a set.
  for (const Term& t : a) {
    bool matched = false;
    for (std::size_t j = 0; j < b.size() && !matched; ++j) {
      if (used[j] || b[j].factors.size() != t.factors.size() || !close(t.coeff, b[j].coeff, rel_tol)) continue;
      bool same = true;
      for (std::size_t k = 0; k < t.factors.size() && same; ++k)
        same = atoms_close(t.factors[k], b[j].factors[k], rel_tol);
      if (same) used[j] = matched = true;
    }
    if (!matched) return false;
  }
  return true;
}

GrowthBound growth_bound(const Expr& x) {
  if (x.is_zero()) return {0.0, {}};
  GrowthBound g;
  std::vector<std::array<double, 4>> rates;
  for (const Term& t : x.terms()) {
    double M = std::abs(t.coeff);
    std::array<double, 4> rate{};
    for (const Atom& a : t.factors) {
      std::visit(overloaded{
                     [&](const Power& p) {
                       if (p.exponent < 0)
                         fail(ErrorKind::Domain, std::string("negative power of ") + var_char(p.var) +
                                                     " is unbounded at 0; no exponential-order certificate");
                       // sup v^e exp(-eps v) = (e / (eps e))^e
                       const double e = p.exponent;
                       M *= std::pow(e / kPolynomialSlack, e) * std::exp(-e);
                       rate[index(p.var)] += kPolynomialSlack;
                     },
                     [&](const Exponential& e) {
                       for (int i = 0; i < 4; ++i) rate[i] += e.form.coeff[i];
                     },
                     [&](const Sine&) {},
                     [&](const Cosine&) {},
                     [&](const Heaviside&) {},
                     [&](const MittagLeffler& m) {
                       if (m.c > 0)
                         fail(ErrorKind::Domain, "Mittag-Leffler factor with positive argument has no certified bound");
                       // E_{g,b}(-x) is completely monotone for 0 < g <= 1, b >= g.
                       if (!(m.gamma <= 1 && m.beta >= m.gamma))
                         fail(ErrorKind::Domain, "Mittag-Leffler factor outside the certified family (g <= 1, b >= g)");
                       M *= 1.0 / gamma(m.beta);
                     },
                 },
                 a);
    }
    g.M += M;
    rates.push_back(rate);
  }
  for (int i = 0; i < 4; ++i) {
    g.rate[i] = rates[0][i];
    for (const auto& r : rates) g.rate[i] = std::max(g.rate[i], r[i]);
  }
  return g;
}

}  // namespace shehu
