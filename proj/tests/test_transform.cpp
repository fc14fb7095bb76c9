#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include "shehu/error.hpp"
#include "shehu/oracle.hpp"
#include "shehu/parser.hpp"
#include "shehu/special.hpp"
#include "shehu/transform.hpp"
#include "shehu/verify.hpp"
#include "support.hpp"

using namespace shehu;
using shehu::test::rel_err;

namespace {

TFExpr fwd(const char* text, VarSet vars = VarSet::all()) { return forward(parse_expr(text), vars); }

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Usage;
}

std::vector<ShehuPoint> points(const Expr& f, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ShehuPoint> out;
  for (int i = 0; i < n; ++i) out.push_back(random_point(rng, region_rates(f)));
  return out;
}

}  // namespace

TEST_SUITE("transform-engine") {
  TEST_CASE("forward table rows") {
    CHECK(fwd("1").to_string() == "m*n*o*p/(h*j*k*l)");
    CHECK(canonical_equal(fwd("7"), 7.0 * parse_tf("m*n*o*p/(h*j*k*l)")));
    CHECK(fwd("q*r*s*t").to_string() == "m^2*n^2*o^2*p^2/(h^2*j^2*k^2*l^2)");
    CHECK(fwd("exp(q+r+s+t)").to_string() == "m*n*o*p/((h-m)*(j-n)*(k-o)*(l-p))");
    CHECK(fwd("exp(2*q-r)").to_string() == "m*n*o*p/((h-2*m)*(j+n)*k*l)");
    CHECK(canonical_equal(fwd("sin(q)*sin(r)*sin(s)*sin(t)"),
                          parse_tf("m^2*n^2*o^2*p^2/((h^2+m^2)*(j^2+n^2)*(k^2+o^2)*(l^2+p^2))")));
    CHECK(canonical_equal(fwd("cos(q)*cos(r)*cos(s)*cos(t)"),
                          parse_tf("h*j*k*l*m*n*o*p/((h^2+m^2)*(j^2+n^2)*(k^2+o^2)*(l^2+p^2))")));
    CHECK(canonical_equal(fwd("q^2*r^0.5*s^3*t^1.5"),
                          (shehu::gamma(3) * shehu::gamma(1.5) * shehu::gamma(4) * shehu::gamma(2.5)) *
                              parse_tf("(m/h)^3*(n/j)^1.5*(o/k)^4*(p/l)^2.5")));
    CHECK(fwd("ml(0.5;-t^0.5)").to_string() == "(p/l)^0.5*m*n*o/(h*j*k*((l/p)^0.5+1))");
    CHECK(canonical_equal(fwd("sin(q)*sin(r)*sin(s)*ml(0.5;-t^0.5)"),
                          parse_tf("m^2*n^2*o^2/((h^2+m^2)*(j^2+n^2)*(k^2+o^2))*(l/p)^(-0.5)/((l/p)^0.5+1)")));
    CHECK(canonical_equal(fwd("U(q-1,r-1,s-1,t-1)"), parse_tf("m*n*o*p/(h*j*k*l)*exp(-h/m-j/n-k/o-l/p)")));
    CHECK(fwd("q*exp(q)").to_string() == "m^2*n*o*p/((h-m)^2*j*k*l)");
  }

  TEST_CASE("mixed linear sine and cosine follow the complex-exponential form") {
    // Im/Re of mnop/((h-im)(j-in)(k-io)(l-ip)) at a sample point.
    const ShehuPoint pt = ShehuPoint::parse("h=2,j=3,k=1.5,l=2.5,m=1,n=0.5,o=2,p=1");
    std::complex<double> z = 1;
    for (int i = 0; i < 4; ++i) z *= pt.mate[i] / std::complex<double>(pt.param[i], -pt.mate[i]);
    CHECK(fwd("sin(q+r+s+t)").eval(pt) == doctest::Approx(z.imag()).epsilon(1e-13));
    CHECK(fwd("cos(q+r+s+t)").eval(pt) == doctest::Approx(z.real()).epsilon(1e-13));
  }

  TEST_CASE("partial transforms leave the other variables alone") {
    CHECK(fwd("exp(q)", VarSet::parse("q")).to_string() == "m/(h-m)");
    CHECK(fwd("exp(q)*sin(s)", VarSet::parse("qs")).to_string() == "m*o^2/((h-m)*(k^2+o^2))");
    CHECK(canonical_equal(fwd("sin(q)*exp(2*t)", VarSet::parse("qt")), parse_tf("m^2/(h^2+m^2)*p/(l-2*p)")));
    CHECK(kind_of([] { fwd("exp(q)*r", VarSet::parse("qs")).terms(); }) == ErrorKind::Untransformable);
  }

  TEST_CASE("separable products transform factorwise") {
    const TFExpr whole = fwd("q^2*exp(-r)*sin(3*s)*cos(t)");
    const TFExpr parts = fwd("q^2") * fwd("exp(-r)") * fwd("sin(3*s)") * fwd("cos(t)") *
                         pow(parse_tf("h*j*k*l/(m*n*o*p)"), Exponent::of(3));
    CHECK(canonical_equal(whole, parts));
  }

  TEST_CASE("untransformable inputs") {
    CHECK(kind_of([] { fwd("t^0.5*sin(t)"); }) == ErrorKind::Untransformable);
    CHECK(kind_of([] { fwd("ml(0.5,2;-t^0.5)"); }) == ErrorKind::Untransformable);
  }

  TEST_CASE("inverse examples") {
    CHECK(inverse(parse_tf("m*n*o*p/((h-m)*(j-n)*(k-o)*(l-p))")).to_string() == "exp(q+r+s+t)");
    CHECK(inverse(parse_tf("m*n*o*p/(h*j*k*l)")).to_string() == "1");
    CHECK(inverse(parse_tf("(m/(h+2*m))*(n/(j-n))*(o/(k+2*o))*(p/(l-p))")).to_string() == "exp(-2*q+r-2*s+t)");
    CHECK(inverse(parse_tf("m*n*o*(l/p)^(alpha-1)/(h*j*k*((l/p)^alpha+1))"), 0.5).to_string() == "ml(0.5;-t^0.5)");
    CHECK(canonical_equal(inverse(parse_tf("m*n*o*p/(h*j*k*l)*exp(-h/m-j/n-k/o-l/p)")),
                          parse_expr("U(q-1,r-1,s-1,t-1)")));
    // repeated quadratic poles
    CHECK(canonical_equal(inverse(fwd("q*sin(q)")), parse_expr("q*sin(q)")));
  }

  TEST_CASE("inverse failures") {
    CHECK(kind_of([] { inverse(parse_tf("h/(h^2+m^2)^0.3")); }) == ErrorKind::NoClosedFormInverse);
    CHECK(kind_of([] { inverse(parse_tf("(l/p)^alpha*m*n*o*p/(h*j*k*l)")); }) == ErrorKind::Usage);
  }

  TEST_CASE("scale rule") {
    const TFExpr one = parse_tf("m*n*o*p/(h*j*k*l)");
    CHECK(canonical_equal(scale_rule(one, {2, 2, 2, 2}), one));
    CHECK(canonical_equal(scale_rule(fwd("exp(q)"), {3, 1, 1, 1}), fwd("exp(3*q)")));
    CHECK(scale_rule(fwd("sin(q)*t"), {1, 1, 1, 1}) == fwd("sin(q)*t"));
  }

  TEST_CASE("shift rule") {
    CHECK(canonical_equal(shift_rule(fwd("1"), {1, -2, 0.5, 3}), fwd("exp(q-2*r+0.5*s+3*t)")));
    CHECK(shift_rule(fwd("q*t"), {0, 0, 0, 0}) == fwd("q*t"));
    const TFExpr shifted = shift_rule(fwd("q*r*s*t"), {1, 0, 0, 0});
    CHECK(shifted.to_string() == "m^2*n^2*o^2*p^2/((h-m)^2*j^2*k^2*l^2)");
    const Expr g = parse_expr("q*r*s*t*exp(q)");
    for (const ShehuPoint& pt : points(g, 5, 11)) CHECK(rel_err(shifted.eval(pt), shehu_numeric(g, pt)) < 1e-9);
  }

  TEST_CASE("Heaviside shift") {
    const TFExpr one = parse_tf("m*n*o*p/(h*j*k*l)");
    CHECK(canonical_equal(heaviside_shift(one, {1, 1, 1, 1}), parse_tf("m*n*o*p/(h*j*k*l)*exp(-h/m-j/n-k/o-l/p)")));
    CHECK(heaviside_shift(one, {0, 0, 0, 0}) == one);
    const Expr u = parse_expr("U(q-1,r-1,s-1,t-1)");
    for (const ShehuPoint& pt : points(u, 3, 12))
      CHECK(rel_err(heaviside_shift(one, {1, 1, 1, 1}).eval(pt), shehu_numeric(u, pt)) < 1e-9);
    const std::array<double, 4> a{0.5, 1, 1.5, 0.25};
    const Expr f = parse_expr("exp(q+r+s+t)");
    CHECK(canonical_equal(heaviside_shift(forward(f), a), forward(f.shifted(a) * Expr::atom(Heaviside{a, VarSet::all()}))));
    CHECK_THROWS_AS(heaviside_shift(one, {-1, 0, 0, 0}), Error);
  }

  TEST_CASE("partial derivative rule") {
    const RuleResult r = partial_rule(2, Var::q);
    CHECK(r.principal.to_string() == "h^2/m^2");
    REQUIRE(r.boundary_terms.size() == 2);
    CHECK(r.boundary_terms[0].coeff.to_string() == "h/m");
    CHECK(r.boundary_terms[0].trace.to_string() == "f(0,r,s,t)");
    CHECK(r.boundary_terms[1].trace.to_string() == "f_q(0,r,s,t)");
    const Expr f = parse_expr("exp(q+r+s+t)");
    CHECK(canonical_equal(apply_rule(partial_rule(1, Var::q), f), forward(f)));
    CHECK(canonical_equal(apply_rule(r, parse_expr("sin(q)")), fwd("-sin(q)")));
    CHECK(apply_rule(partial_rule(3, Var::s), Expr{}).is_zero());
  }

  TEST_CASE("mixed derivative rule") {
    const RuleResult r = mixed_rule();
    CHECK(r.principal.to_string() == "h*j*k*l/(m*n*o*p)");
    REQUIRE(r.boundary_terms.size() == 15);
    int plus = 0, minus = 0;
    for (const BoundaryTerm& b : r.boundary_terms) (b.coeff.terms()[0].coeff > 0 ? plus : minus)++;
    CHECK(plus == 8);  // four triple traces and four single traces enter with a minus sign
    CHECK(minus == 7);
    const Expr e2 = parse_expr("exp(q+r+s+t)");
    CHECK(canonical_equal(apply_rule(r, e2), forward(e2)));
    // Boundary aggregate of the mixed rule on exp(q+r+s+t): (hjkl - mnop)/mnop times the image.
    const TFExpr delta2 = r.principal * forward(e2) - apply_rule(r, e2);
    CHECK(canonical_equal(delta2, parse_tf("(h*j*k*l/(m*n*o*p) - 1)*m*n*o*p/((h-m)*(j-n)*(k-o)*(l-p))")));
    const Expr e3 = parse_expr("exp(-2*q+r-2*s+t)");
    const TFExpr delta3 = r.principal * forward(e3) - apply_rule(r, e3);
    CHECK(canonical_equal(delta3, parse_tf("(h*j*k*l/(m*n*o*p) - 4)*m*n*o*p/((h+2*m)*(j-n)*(k+2*o)*(l-p))")));
    CHECK(apply_rule(r, parse_expr("3.5")).is_zero());
  }

  TEST_CASE("Caputo rule") {
    const RuleResult r = caputo_rule(0.5, Var::t);
    CHECK(r.principal.to_string() == "(l/p)^0.5");
    REQUIRE(r.boundary_terms.size() == 1);
    CHECK(r.boundary_terms[0].coeff.to_string() == "(p/l)^0.5");
    CHECK(caputo_rule(0.5, Var::t, true).principal.to_string() == "(l/p)^alpha");
    CHECK(caputo_rule(1.5, Var::t).boundary_terms.size() == 2);
    // alpha = 1 reduces to the first partial rule
    const RuleResult one = caputo_rule(1.0, Var::r), p1 = partial_rule(1, Var::r);
    CHECK(canonical_equal(one.principal, p1.principal));
    CHECK(canonical_equal(one.boundary_terms[0].coeff, p1.boundary_terms[0].coeff));
    // eigenfunction: D^0.5 E_0.5(-t^0.5) = -E_0.5(-t^0.5)
    const Expr ml = parse_expr("ml(0.5;-t^0.5)");
    CHECK(canonical_equal(apply_rule(r, ml), -1.0 * forward(ml)));
    // Time-fractional diffusion image with alpha kept symbolic
    const Expr ex1 = parse_expr("sin(q)*sin(r)*sin(s)*ml(0.5;-t^0.5)");
    const TFExpr lhs = caputo_rule(0.5, Var::t, true).principal * forward(ex1) -
                       parse_tf("(l/p)^(alpha-1)*m^2*n^2*o^2/((h^2+m^2)*(j^2+n^2)*(k^2+o^2))");
    CHECK(canonical_equal(lhs.bind_alpha(0.5), apply_rule(r, ex1)));
  }

  TEST_CASE("multiply by powers") {
    const TFExpr one = parse_tf("m*n*o*p/(h*j*k*l)");
    CHECK(canonical_equal(multiply_by_powers_rule(one, {1, 1, 1, 1}), pow(one, Exponent::of(2))));
    CHECK(canonical_equal(multiply_by_powers_rule(one, {1, 1, 1, 1}), fwd("q*r*s*t")));
    CHECK(multiply_by_powers_rule(one, {0, 0, 0, 0}) == one);
    const TFExpr eq = fwd("exp(q)", VarSet::parse("q"));
    CHECK(multiply_by_powers_rule(eq, {1, 0, 0, 0}).to_string() == "m^2/(h-m)^2");
    CHECK(canonical_equal(multiply_by_powers_rule(fwd("exp(q)*sin(2*r)"), {2, 1, 0, 3}),
                          fwd("q^2*r*t^3*exp(q)*sin(2*r)")));
    const Expr g = parse_expr("q*exp(q)");
    for (const ShehuPoint& pt : points(g, 5, 13))
      CHECK(rel_err(multiply_by_powers_rule(eq, {1, 0, 0, 0}).eval(pt), shehu_numeric(g, pt, VarSet::parse("q"))) <
            1e-9);
  }

  TEST_CASE("convolution identity") {
    const TFExpr one = fwd("1");
    CHECK(canonical_equal(convolution(one, one), fwd("q*r*s*t")));
    CHECK(canonical_equal(convolution(fwd("exp(q+r+s+t)"), one), fwd("exp(q+r+s+t)") * one));
    CHECK(canonical_equal(convolution(fwd("exp(q)"), fwd("sin(t)")), convolution(fwd("sin(t)"), fwd("exp(q)"))));
    const Expr e = parse_expr("exp(q+r+s+t)"), c = parse_expr("1");
    const ShehuPoint pt = ShehuPoint::uniform(3, 1);
    CHECK(rel_err(convolution(forward(e), forward(c)).eval(pt), shehu_numeric_convolution(e, c, pt)) < 1e-8);
  }

  TEST_CASE("existence bound") {
    const ExistenceBound b = existence_bound(parse_expr("exp(q+r+s+t)"), ShehuPoint::uniform(2, 1));
    CHECK(b.bound == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(fwd("exp(q+r+s+t)").eval(ShehuPoint::uniform(2, 1))) <= b.bound);
    const ExistenceBound s = existence_bound(parse_expr("sin(q)*sin(r)*sin(s)*sin(t)"), ShehuPoint::uniform(0.01, 1));
    CHECK(s.region.rate == std::array<double, 4>{0, 0, 0, 0});
    CHECK(kind_of([] { existence_bound(parse_expr("exp(2*q)"), ShehuPoint::parse("h=2,m=1")); }) ==
          ErrorKind::OutsideRegion);
  }

  TEST_CASE("linearity on 100 random pairs") {
    const auto& corpus = property_corpus();
    std::mt19937_64 rng(8);
    for (int i = 0; i < 100; ++i) {
      const Expr f = parse_expr(corpus[rng() % corpus.size()]), g = parse_expr(corpus[rng() % corpus.size()]);
      const double a = shehu::test::uniform(rng, -3, 3), b = shehu::test::uniform(rng, -3, 3);
      CHECK(canonical_equal(forward(a * f + b * g), a * forward(f) + b * forward(g)));
    }
  }

  TEST_CASE("round trip on the invertible corpus") {
    for (const std::string& text : roundtrip_corpus()) {
      CAPTURE(text);
      const Expr f = parse_expr(text);
      CHECK(canonical_equal(inverse(forward(f)), f));
    }
  }

  TEST_CASE("operational rules hold against the oracle") {
    for (const std::string& name : property_names()) {
      CAPTURE(name);
      const PropertyReport r = verify_property(name, 20, 42);
      CAPTURE(r.failures.empty() ? std::string() : r.failures.front());
      CHECK(r.ok());
    }
  }
}
