#include "shehu/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "shehu/error.hpp"
#include "shehu/pde.hpp"
#include "shehu/quadrature.hpp"
#include "shehu/special.hpp"

namespace shehu {

namespace {

constexpr double kTensorBudget = 4e6;  // grid points per coupled component
constexpr double kMLTailLimit = 1e-9;   // kernel mass allowed beyond a Mittag-Leffler cut

struct AxisRule {
  std::vector<double> x;
  std::vector<double> w;  // includes x^power
};

// Per-variable description of one term.
struct AxisAtoms {
  double exp_rate = 0;               // exp(exp_rate * v)
  double power = 0;                  // v^power
  double start = 0;                  // Heaviside lower limit
  double omega = 0;                  // fastest oscillation touching v
  const MittagLeffler* ml = nullptr;
  std::vector<const Atom*> local;    // single-variable trig atoms
};

// Composite Gauss-Legendre on [start, start + T]; the first panel carries the
// x^e endpoint weight exactly (Gauss-Jacobi) and is graded when a
// Mittag-Leffler factor adds a series in x^g.
// Largest t <= T at which the decaying Mittag-Leffler factor is still
// evaluable by its series; the integral is truncated there.
double ml_reach(const MittagLeffler& m, double T) {
  auto ok = [&](double t) {
    try {
      mittag_leffler(m.gamma, m.beta, m.c * std::pow(t, m.gamma));
      return true;
    } catch (const Error&) {
      return false;
    }
  };
  if (ok(T)) return T;
  double lo = 0, hi = T;
  for (int i = 0; i < 50; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

AxisRule axis_rule(const AxisAtoms& a, double decay, int nodes, const QuadratureSpec& spec, bool tensor = false) {
  double T = (std::log(1.0 / spec.eps_trunc) + 5.0) / decay;
  if (a.ml && a.ml->c < 0) {
    // E(-x) is completely monotone (|E| <= 1/Gamma(beta)), so the dropped
    // tail is bounded by the kernel alone.
    T = ml_reach(*a.ml, T);
    if (std::exp(-decay * T) > kMLTailLimit)
      fail(ErrorKind::Domain, "Mittag-Leffler factor not evaluable far enough to truncate the integral; "
                              "increase the transform parameter");
  }
  double width = T / spec.min_panels;
  if (a.omega > 0) width = std::min(width, std::numbers::pi / a.omega);
  const int panels = static_cast<int>(std::ceil(T / width - 1e-9));
  width = T / panels;
  // Mittag-Leffler series and (outside tensor grids) oscillations need more
  // nodes per panel.
  const int floor_nodes = a.ml ? 12 : (a.omega > 0 && !tensor ? 8 : 4);
  const int per_panel = std::max(floor_nodes, (nodes + panels - 1) / panels);
  const GaussRule& gl = gauss_legendre(per_panel);
  AxisRule r;
  r.x.reserve(static_cast<std::size_t>(panels * per_panel));
  r.w.reserve(r.x.capacity());
  const double e = a.power;
  int first = 0;
  // Gauss-Jacobi on [0, len] with weight x^e.
  auto jacobi_panel = [&](double len) {
    const GaussRule& gj = gauss_jacobi(per_panel, 0, e);
    const double scale = std::pow(0.5 * len, e + 1);
    for (std::size_t i = 0; i < gj.x.size(); ++i) {
      r.x.push_back(0.5 * len * (1 + gj.x[i]));
      r.w.push_back(scale * gj.w[i]);
    }
  };
  if (a.start == 0 && a.ml && a.ml->gamma != 1) {
    // Series in x^g times a kernel smooth in x: grade the mesh geometrically
    // toward 0 so both are resolved, ending in a weighted panel.
    constexpr double kRatio = 0.15;
    constexpr int kLevels = 15;
    double hi = width;
    for (int k = 0; k < kLevels; ++k) {
      const double lo = hi * kRatio;
      for (std::size_t i = 0; i < gl.x.size(); ++i) {
        const double x = lo + 0.5 * (hi - lo) * (1 + gl.x[i]);
        r.x.push_back(x);
        r.w.push_back(0.5 * (hi - lo) * gl.w[i] * (e == 0 ? 1.0 : std::pow(x, e)));
      }
      hi = lo;
    }
    jacobi_panel(hi);
    first = 1;
  } else if (a.start == 0 && e != std::floor(e)) {
    jacobi_panel(width);
    first = 1;
  }
  for (int p = first; p < panels; ++p) {
    const double lo = a.start + p * width;
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      const double x = lo + 0.5 * width * (1 + gl.x[i]);
      r.x.push_back(x);
      r.w.push_back(0.5 * width * gl.w[i] * (e == 0 ? 1.0 : std::pow(x, e)));
    }
  }
  return r;
}

struct Axis {
  std::vector<double> x;
  std::vector<double> fw;  // quadrature weight times every one-variable factor and the kernel
};

Axis build_axis(Var v, const AxisAtoms& a, double s, int nodes, const QuadratureSpec& spec, bool tensor = false) {
  double decay = s - a.exp_rate;
  if (a.power > 0) decay -= kPolynomialSlack;
  if (a.ml && a.ml->c > 0) decay -= std::pow(a.ml->c, 1 / a.ml->gamma);
  if (!(decay >= spec.min_margin))
    fail(ErrorKind::OutsideRegion, std::string("insufficient decay margin on ") + var_char(v) + " for quadrature");
  AxisRule r = axis_rule(a, decay, nodes, spec, tensor);
  Axis ax{r.x, r.w};
  Point4 pt{};
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    const double x = r.x[i];
    pt[index(v)] = x;
    double f = std::exp((a.exp_rate - s) * x);
    if (a.ml) f *= eval(Atom(*a.ml), pt);
    for (const Atom* at : a.local) f *= eval(*at, pt);
    ax.fw[i] *= f;
  }
  return ax;
}

double sum_axis(const Axis& a) {
  double s = 0;
  for (double w : a.fw) s += w;
  return s;
}

// Tensor sum over coupled axes of prod(fw) * prod(trig(phase)).
double tensor_sum(const std::vector<Axis>& axes, const std::vector<Var>& order,
                  const std::vector<std::pair<bool, LinearForm>>& coupled) {
  const std::size_t k = axes.size(), na = coupled.size();
  std::vector<std::vector<double>> phase(k + 1, std::vector<double>(na, 0.0));
  double total = 0;
  auto rec = [&](auto&& self, std::size_t depth, double weight) -> void {
    if (depth == k) {
      double f = weight;
      for (std::size_t j = 0; j < na; ++j) f *= coupled[j].first ? std::sin(phase[k][j]) : std::cos(phase[k][j]);
      total += f;
      return;
    }
    const Axis& ax = axes[depth];
    const Var v = order[depth];
    for (std::size_t i = 0; i < ax.x.size(); ++i) {
      for (std::size_t j = 0; j < na; ++j) phase[depth + 1][j] = phase[depth][j] + coupled[j].second[v] * ax.x[i];
      self(self, depth + 1, weight * ax.fw[i]);
    }
  };
  rec(rec, 0, 1.0);
  return total;
}

double integrate_term(const Term& t, const ShehuPoint& pt, VarSet vars, const QuadratureSpec& spec) {
  std::array<AxisAtoms, 4> axes{};
  std::vector<const Atom*> multi;
  for (const Atom& a : t.factors) {
    if (!support(a).subset_of(vars))
      fail(ErrorKind::Usage, "integrand depends on variables outside the integration set");
    if (auto* p = std::get_if<Power>(&a)) axes[index(p->var)].power += p->exponent;
    else if (auto* e = std::get_if<Exponential>(&a))
      for (Var v : kVars) axes[index(v)].exp_rate += e->form[v];
    else if (auto* m = std::get_if<MittagLeffler>(&a)) axes[index(m->var)].ml = m;
    else if (auto* h = std::get_if<Heaviside>(&a))
      for (Var v : h->vars.vars()) axes[index(v)].start = h->shift[index(v)];
    else {
      const LinearForm& f = std::holds_alternative<Sine>(a) ? std::get<Sine>(a).form : std::get<Cosine>(a).form;
      for (Var v : f.support().vars()) axes[index(v)].omega = std::max(axes[index(v)].omega, std::abs(f[v]));
      if (f.support().size() == 1) axes[index(f.support().vars()[0])].local.push_back(&a);
      else multi.push_back(&a);
    }
  }
  std::array<int, 4> root{0, 1, 2, 3};
  auto find = [&](int i) {
    while (root[i] != i) i = root[i];
    return i;
  };
  for (const Atom* a : multi) {
    auto vs = support(*a).vars();
    for (std::size_t i = 1; i < vs.size(); ++i) root[find(index(vs[i]))] = find(index(vs[0]));
  }
  double result = t.coeff;
  for (int oi = 0; oi < 4; ++oi) {
    const int c = spec.axis_order[oi];
    if (!vars.contains(var_at(c)) || find(c) != c) continue;
    std::vector<Var> comp;
    for (int oj = 0; oj < 4; ++oj)
      if (find(spec.axis_order[oj]) == c && vars.contains(var_at(spec.axis_order[oj]))) comp.push_back(var_at(spec.axis_order[oj]));
    if (comp.size() == 1) {
      const Var v = comp[0];
      result *= sum_axis(build_axis(v, axes[index(v)], pt.ratio(index(v)), spec.nodes_per_axis, spec));
      continue;
    }
    // Spend a fixed grid budget: small components get finer axes.
    const int n = std::clamp(static_cast<int>(std::pow(kTensorBudget, 1.0 / static_cast<double>(comp.size()))),
                             spec.tensor_nodes_per_axis, 4 * spec.nodes_per_axis);
    std::vector<Axis> built;
    for (Var v : comp) built.push_back(build_axis(v, axes[index(v)], pt.ratio(index(v)), n, spec, true));
    std::vector<std::pair<bool, LinearForm>> coupled;
    for (const Atom* a : multi) {
      if (find(index(support(*a).vars()[0])) != c) continue;
      if (auto* s = std::get_if<Sine>(a)) coupled.emplace_back(true, s->form);
      else coupled.emplace_back(false, std::get<Cosine>(*a).form);
    }
    result *= tensor_sum(built, comp, coupled);
  }
  return result;
}

// ---- convolution helpers ----

double gl_integral(const std::function<double(double)>& h, double lo, double hi, int nodes, double max_width) {
  if (hi <= lo) return 0;
  const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_width)));
  const double width = (hi - lo) / panels;
  const GaussRule& gl = gauss_legendre(nodes);
  double s = 0;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * width;
    for (std::size_t i = 0; i < gl.x.size(); ++i) s += gl.w[i] * h(a + 0.5 * width * (1 + gl.x[i]));
  }
  return 0.5 * width * s;
}

// One-variable factors of a separable term; throws when atoms couple variables.
std::array<Term, 4> split_term(const Term& t) {
  std::array<Term, 4> out{};
  for (int i = 0; i < 4; ++i) out[i].coeff = 1;
  out[0].coeff = t.coeff;
  for (const Atom& a : t.factors) {
    if (auto* e = std::get_if<Exponential>(&a)) {
      for (Var v : e->form.support().vars()) {
        LinearForm f;
        f[v] = e->form[v];
        out[index(v)].factors.push_back(Exponential{f});
      }
      continue;
    }
    VarSet s = support(a);
    if (s.size() != 1 || std::holds_alternative<Heaviside>(a))
      fail(ErrorKind::Usage, "convolution oracle needs products of one-variable atoms");
    out[index(s.vars()[0])].factors.push_back(a);
  }
  return out;
}

double eval_axis_term(const Term& t, Var v, double x) {
  Point4 p{};
  p[index(v)] = x;
  double r = t.coeff;
  for (const Atom& a : t.factors) r *= eval(a, p);
  return r;
}

// Halton radical inverse.
double radical_inverse(std::uint64_t i, unsigned base) {
  double f = 1, r = 0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

}  // namespace

double shehu_numeric(const Expr& f, const ShehuPoint& pt, VarSet vars, const QuadratureSpec& spec) {
  pt.validate();
  double total = 0;
  for (const Term& t : f.terms()) total += integrate_term(t, pt, vars, spec);
  return total;
}

double convolution4(const Expr& f, const Expr& g, const Point4& x, int nodes) {
  const GaussRule& gl = gauss_legendre(nodes);
  std::array<std::vector<double>, 4> tau, w;
  double jac = 1;
  for (int d = 0; d < 4; ++d) {
    if (x[d] < 0) fail(ErrorKind::Domain, "convolution point must be nonnegative");
    jac *= 0.5 * x[d];
    for (int i = 0; i < nodes; ++i) {
      tau[d].push_back(0.5 * x[d] * (1 + gl.x[i]));
      w[d].push_back(gl.w[i]);
    }
  }
  // Nested partial sums keep the rounding error at the level of one axis.
  double total = 0;
  Point4 a{}, b{};
  for (int i = 0; i < nodes; ++i) {
    a[0] = tau[0][i], b[0] = x[0] - a[0];
    double s1 = 0;
    for (int j = 0; j < nodes; ++j) {
      a[1] = tau[1][j], b[1] = x[1] - a[1];
      double s2 = 0;
      for (int k = 0; k < nodes; ++k) {
        a[2] = tau[2][k], b[2] = x[2] - a[2];
        double s3 = 0;
        for (int l = 0; l < nodes; ++l) {
          a[3] = tau[3][l], b[3] = x[3] - a[3];
          s3 += w[3][l] * f.eval(a) * g.eval(b);
        }
        s2 += w[2][k] * s3;
      }
      s1 += w[1][j] * s2;
    }
    total += w[0][i] * s1;
  }
  return jac * total;
}

double shehu_numeric_convolution(const Expr& f, const Expr& g, const ShehuPoint& pt, const QuadratureSpec& spec) {
  pt.validate();
  double total = 0;
  for (const Term& tf : f.terms()) {
    auto fa = split_term(tf);
    for (const Term& tg : g.terms()) {
      auto ga = split_term(tg);
      double prod = 1;
      for (Var v : kVars) {
        const Term& fv = fa[index(v)];
        const Term& gv = ga[index(v)];
        // Growth of the 1D convolution: the larger exponential rate plus slack.
        double rate = 0;
        for (const Term* t : {&fv, &gv})
          for (const Atom& a : t->factors)
            if (auto* e = std::get_if<Exponential>(&a)) rate = std::max(rate, e->form[v]);
        // The convolution grows like x * exp(rate x).
        AxisAtoms outer;
        const double decay = pt.ratio(index(v)) - rate - kPolynomialSlack;
        if (!(decay >= spec.min_margin)) fail(ErrorKind::OutsideRegion, "insufficient decay margin for convolution");
        AxisRule r = axis_rule(outer, decay, spec.nodes_per_axis, spec);
        double s = 0;
        for (std::size_t i = 0; i < r.x.size(); ++i) {
          const double x = r.x[i];
          const double c = gl_integral([&](double u) { return eval_axis_term(fv, v, u) * eval_axis_term(gv, v, x - u); },
                                       0, x, 16, 1.0);
          s += r.w[i] * std::exp(-pt.ratio(index(v)) * x) * c;
        }
        prod *= s;
      }
      total += prod;
    }
  }
  return total;
}

ResidualReport pde_residual(const PdeProblem& problem, const Expr& candidate, Box box, int n_samples,
                            std::uint64_t seed) {
  if (!(box.lo < box.hi)) fail(ErrorKind::Usage, "residual box needs lo < hi");
  std::vector<std::pair<double, Expr>> integer_terms;
  std::vector<std::pair<double, FracSpec>> fractional_terms;
  for (const PdeTerm& t : problem.lhs) {
    if (t.op.fractional) {
      fractional_terms.emplace_back(t.coeff, FracSpec{t.op.alpha, t.op.var});
      continue;
    }
    Expr d = candidate;
    for (Var v : kVars) d = d.derivative(v, t.op.orders[index(v)]);
    integer_terms.emplace_back(t.coeff, std::move(d));
  }
  std::mt19937_64 rng(seed);
  std::array<double, 4> shift{};
  for (double& s : shift) s = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  constexpr unsigned kBases[4] = {2, 3, 5, 7};
  ResidualReport rep;
  for (int i = 0; i < n_samples; ++i) {
    Point4 p{};
    for (int d = 0; d < 4; ++d) {
      double u = radical_inverse(static_cast<std::uint64_t>(i + 1), kBases[d]) + shift[d];
      u -= std::floor(u);
      p[d] = box.lo + (box.hi - box.lo) * u;
    }
    double lhs = 0;
    for (const auto& [c, d] : integer_terms) lhs += c * d.eval(p);
    for (const auto& [c, spec] : fractional_terms) lhs += c * caputo(candidate, spec, p);
    const double r = std::abs(lhs - problem.rhs.eval(p));
    rep.sample_points.push_back(p);
    rep.residuals.push_back(r);
    rep.max_abs_residual = std::max(rep.max_abs_residual, r);
  }
  return rep;
}

}  // namespace shehu
