#include "shehu/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "shehu/error.hpp"
#include "shehu/format.hpp"
#include "shehu/oracle.hpp"
#include "shehu/parser.hpp"
#include "shehu/special.hpp"
#include "shehu/transform.hpp"

namespace shehu {

namespace {

constexpr double kMLSampleMargin = 1.0;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

double rel_error(double got, double want) {
  const double d = std::abs(got - want);
  return std::abs(want) > 1e-300 ? d / std::abs(want) : d;
}

struct Check {
  double error;
  std::string detail;
};

using TrialFn = std::function<Check(int, std::mt19937_64&)>;

PropertyReport run_trials(const std::string& name, int trials, std::uint64_t seed, double tol, const TrialFn& fn) {
  PropertyReport rep{name, trials, 0, 0, tol, {}};
  std::mt19937_64 rng(seed);
  for (int i = 0; i < trials; ++i) {
    Check c;
    try {
      c = fn(i, rng);
    } catch (const Error& e) {
      c = {INFINITY, std::string(to_string(e.kind())) + ": " + e.what()};
    }
    rep.max_error = std::max(rep.max_error, c.error);
    if (c.error <= tol) ++rep.passed;
    else rep.failures.push_back(c.detail + " (error " + format_number(c.error) + ")");
  }
  return rep;
}

Expr corpus_member(int i) {
  const auto& c = property_corpus();
  return parse_expr(c[static_cast<std::size_t>(i) % c.size()]);
}

std::array<double, 4> random_array(std::mt19937_64& rng, double lo, double hi) {
  std::array<double, 4> a{};
  for (double& x : a) x = uniform(rng, lo, hi);
  return a;
}

Expr exp_form(const std::array<double, 4>& a) {
  LinearForm f;
  f.coeff = a;
  return Expr::atom(Exponential{f});
}

std::string describe(const Expr& f, const ShehuPoint& pt) { return f.to_string() + " at " + pt.to_string(); }

// Oracle rules that also compare against the symbolic image.
Check compare(double got, double want, const std::string& what) { return {rel_error(got, want), what}; }

}  // namespace

const std::vector<CaputoCase>& caputo_corpus() {
  static const std::vector<CaputoCase> corpus = [] {
    std::vector<CaputoCase> out;
    const std::vector<std::string> others{"1", "exp(q-r)", "sin(q)*s", "q^2*cos(r)"};
    const double alphas[] = {0.3, 0.5, 0.9};
    int n = 0;
    for (double a : alphas) {
      for (int k = 1; k <= 3; ++k) {
        const Expr g = parse_expr(others[n++ % others.size()]);
        const Expr tk = Expr::atom(Power{Var::t, static_cast<double>(k)});
        const double w = gamma(k + 1.0) / gamma(k + 1.0 - a);
        out.push_back({g * tk, (w * g) * Expr::atom(Power{Var::t, k - a}), a});
      }
      const Expr g = parse_expr(others[n++ % others.size()]);
      const Expr ml = Expr::atom(MittagLeffler{a, 1.0, -1.0, Var::t});
      out.push_back({g * ml, -1.0 * (g * ml), a});
    }
    return out;
  }();
  return corpus;
}

const std::vector<std::string>& property_names() {
  static const std::vector<std::string> names{"linearity", "scale",       "shift",           "heaviside",
                                              "convolution", "derivative-rules", "roundtrip"};
  return names;
}

const std::vector<std::string>& property_corpus() {
  static const std::vector<std::string> corpus{
      "1",
      "q*r*s*t",
      "exp(q-2*r+0.5*s+t)",
      "sin(q)*cos(2*r)*exp(-s)*t",
      "q^2*exp(-r)+3*s*t",
      "cos(q)*sin(r)*sin(s)*cos(t)",
      "q*r^2*exp(0.5*s-t)",
      "sin(q+r)*exp(-s)*t",
      "2*exp(q+r+s+t)-q*t",
      "q^3*cos(2*t)+r*s",
  };
  return corpus;
}

const std::vector<std::string>& roundtrip_corpus() {
  static const std::vector<std::string> corpus{
      "1",
      "3.5",
      "q",
      "q*r*s*t",
      "q^2*r^3",
      "t^0.5",
      "q^1.5*exp(-q)",
      "exp(q+r+s+t)",
      "exp(-2*q+r-2*s+t)",
      "sin(q)",
      "cos(2*r)",
      "sin(q)*sin(r)*sin(s)*sin(t)",
      "cos(q)*sin(2*r)*exp(-s)*t",
      "exp(-q)*sin(3*q)",
      "q*exp(2*q)",
      "q^2*cos(t)",
      "ml(0.5;-t^0.5)",
      "sin(q)*sin(r)*sin(s)*ml(0.5;-t^0.5)",
      "ml(0.75;-2*t^0.75)",
      "t^0.5*ml(0.5,1.5;-t^0.5)",
      "U(q-1,r-1,s-1,t-1)",
      "exp(q+r+s+t)*U(q-1,r-0.5)",
      "2*exp(q)-3*r*exp(-s)",
      "q*sin(q)",
      "exp(t)*cos(2*t)*r^2",
  };
  return corpus;
}

const std::vector<std::pair<std::string, std::string>>& convolution_corpus() {
  static const std::vector<std::pair<std::string, std::string>> corpus{
      {"1", "1"},
      {"exp(q+r+s+t)", "1"},
      {"exp(q-r+0.5*s)", "exp(-q+t)"},
      {"2", "exp(0.5*q+0.5*r-s-t)"},
      {"exp(-q-r-s-t)", "exp(q+r+s+t)"},
  };
  return corpus;
}

ShehuPoint random_point(std::mt19937_64& rng, const std::array<double, 4>& rates, double lo, double hi) {
  ShehuPoint pt;
  for (int i = 0; i < 4; ++i) {
    pt.mate[i] = uniform(rng, 0.5, 2.0);
    pt.param[i] = (std::max(rates[i], 0.0) + uniform(rng, lo, hi)) * pt.mate[i];
  }
  return pt;
}

std::array<double, 4> region_rates(const Expr& f) {
  std::array<double, 4> r{};
  try {
    r = growth_bound(f).rate;
  } catch (const Error&) {
    // No certificate (e.g. negative powers): use the exponential rates.
    for (const Term& t : f.terms())
      for (const Atom& a : t.factors)
        if (auto* e = std::get_if<Exponential>(&a))
          for (int i = 0; i < 4; ++i) r[i] = std::max(r[i], e->form.coeff[i]);
  }
  // The Mittag-Leffler series is evaluable only for moderate arguments, so
  // the oracle needs extra decay to truncate those axes early.
  std::array<bool, 4> ml{};
  for (const Term& t : f.terms())
    for (const Atom& a : t.factors)
      if (auto* m = std::get_if<MittagLeffler>(&a)) ml[index(m->var)] = true;
  for (int i = 0; i < 4; ++i)
    if (ml[i]) r[i] = std::max(r[i], 0.0) + kMLSampleMargin;
  return r;
}

PropertyReport verify_property(const std::string& name, int trials, std::uint64_t seed) {
  if (trials < 1) fail(ErrorKind::Usage, "trials must be positive");
  if (name == "linearity") {
    return run_trials(name, trials, seed, 1e-12, [](int i, std::mt19937_64& rng) {
      const Expr f = corpus_member(i), g = corpus_member(i + 3);
      const double a = uniform(rng, -2, 2), b = uniform(rng, -2, 2);
      const TFExpr lhs = forward(a * f + b * g), rhs = a * forward(f) + b * forward(g);
      std::array<double, 4> rates = region_rates(f);
      const auto rg = region_rates(g);
      for (int k = 0; k < 4; ++k) rates[k] = std::max(rates[k], rg[k]);
      const ShehuPoint pt = random_point(rng, rates);
      Check c = compare(lhs.eval(pt), rhs.eval(pt), describe(f, pt) + " with " + g.to_string());
      if (!canonical_equal(lhs, rhs)) c.error = INFINITY;
      return c;
    });
  }
  if (name == "scale") {
    return run_trials(name, trials, seed, 1e-6, [](int i, std::mt19937_64& rng) {
      const Expr f = corpus_member(i);
      const auto a = random_array(rng, 0.5, 2.0);
      const Expr g = f.scaled(a);
      const ShehuPoint pt = random_point(rng, region_rates(g));
      return compare(scale_rule(forward(f), a).eval(pt), shehu_numeric(g, pt), describe(g, pt));
    });
  }
  if (name == "shift") {
    return run_trials(name, trials, seed, 1e-6, [](int i, std::mt19937_64& rng) {
      const Expr f = corpus_member(i);
      const auto a = random_array(rng, -1.0, 1.0);
      const Expr g = f * exp_form(a);
      const ShehuPoint pt = random_point(rng, region_rates(g));
      return compare(shift_rule(forward(f), a).eval(pt), shehu_numeric(g, pt), describe(g, pt));
    });
  }
  if (name == "heaviside") {
    return run_trials(name, trials, seed, 1e-6, [](int i, std::mt19937_64& rng) {
      const Expr f = corpus_member(i);
      const auto a = random_array(rng, 0.0, 1.5);
      Heaviside h;
      h.vars = VarSet::all();
      h.shift = a;
      const Expr g = f.shifted(a) * Expr::atom(h);
      const ShehuPoint pt = random_point(rng, region_rates(f));
      return compare(heaviside_shift(forward(f), a).eval(pt), shehu_numeric(g, pt), describe(g, pt));
    });
  }
  if (name == "convolution") {
    return run_trials(name, trials, seed, 1e-5, [](int i, std::mt19937_64& rng) {
      const auto& c = convolution_corpus();
      const auto& [fs, gs] = c[static_cast<std::size_t>(i) % c.size()];
      const Expr f = parse_expr(fs), g = parse_expr(gs);
      std::array<double, 4> rates = region_rates(f);
      const auto rg = region_rates(g);
      for (int k = 0; k < 4; ++k) rates[k] = std::max(rates[k], rg[k]);
      const ShehuPoint pt = random_point(rng, rates);
      return compare(convolution(forward(f), forward(g)).eval(pt), shehu_numeric_convolution(f, g, pt),
                     f.to_string() + " **** " + g.to_string() + " at " + pt.to_string());
    });
  }
  if (name == "derivative-rules") {
    return run_trials(name, trials, seed, 1e-8, [](int i, std::mt19937_64& rng) {
      const int which = static_cast<int>(i / property_corpus().size()) % 4;
      Expr f = corpus_member(i);
      RuleResult rule;
      Expr df = f;
      std::string label;
      double lo = 1.0;
      if (which == 0) {
        const Var v = var_at(static_cast<int>(rng() % 4));
        const int n = 1 + static_cast<int>(rng() % 2);
        rule = partial_rule(n, v);
        df = f.derivative(v, n);
        label = std::string("partial d^") + std::to_string(n) + "/d" + var_char(v);
      } else if (which == 1) {
        rule = mixed_rule();
        for (Var v : kVars) df = df.derivative(v);
        label = "mixed";
      } else if (which == 2) {
        std::array<int, 4> orders{};
        for (int& k : orders) k = static_cast<int>(rng() % 3);
        rule = derivative_rule(orders);
        for (Var v : kVars) df = df.derivative(v, orders[index(v)]);
        label = "orders " + std::to_string(orders[0]) + std::to_string(orders[1]) + std::to_string(orders[2]) +
                std::to_string(orders[3]);
      } else {
        // Caputo in t on members with closed-form fractional derivatives.
        const auto& c = caputo_corpus();
        const CaputoCase& cc = c[static_cast<std::size_t>(i) % c.size()];
        f = cc.f;
        df = cc.df;
        rule = caputo_rule(cc.alpha, Var::t);
        label = "caputo alpha=" + format_number(cc.alpha);
        lo = 4.0;  // keeps the Mittag-Leffler argument small over the quadrature range
      }
      const ShehuPoint pt = random_point(rng, region_rates(f), lo, lo + 2.0);
      const double got = apply_rule(rule, f).eval(pt);
      const double want = forward(df).eval(pt);
      Check c = compare(got, want, label + " of " + describe(f, pt));
      // The identity must also hold against the oracle, at quadrature accuracy.
      const double oracle = shehu_numeric(df, pt);
      if (std::abs(got - oracle) > 1e-6 * std::max(std::abs(oracle), 1e-3 * std::abs(forward(f).eval(pt))))
        c.error = std::max(c.error, 1.0);
      return c;
    });
  }
  if (name == "roundtrip") {
    return run_trials(name, trials, seed, 0.0, [](int i, std::mt19937_64&) {
      const auto& c = roundtrip_corpus();
      const Expr f = parse_expr(c[static_cast<std::size_t>(i) % c.size()]);
      const Expr g = inverse(forward(f));
      return Check{canonical_equal(g, f) ? 0.0 : 1.0, f.to_string() + " came back as " + g.to_string()};
    });
  }
  fail(ErrorKind::Usage, "unknown property '" + name + "'");
}

}  // namespace shehu
