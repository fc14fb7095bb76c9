#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "shehu/error.hpp"
#include "shehu/expr.hpp"
#include "shehu/parser.hpp"
#include "shehu/tf_expr.hpp"
#include "support.hpp"

using namespace shehu;
using shehu::test::rel_err;
using shehu::test::uniform;

namespace {

const char* kVarNames[] = {"q", "r", "s", "t"};

std::string number(std::mt19937_64& rng) {
  static const char* vals[] = {"1", "2", "0.5", "3", "1.5", "0.25"};
  return vals[rng() % 6];
}

std::string linear(std::mt19937_64& rng) {
  std::string s;
  for (int v = 0; v < 4; ++v) {
    if (rng() % 3 != 0) continue;
    if (!s.empty()) s += rng() % 2 ? "+" : "-";
    else if (rng() % 4 == 0) s += "-";
    s += number(rng) + "*" + kVarNames[v];
  }
  return s.empty() ? std::string(kVarNames[rng() % 4]) : s;
}

std::string atom(std::mt19937_64& rng, bool with_ml) {
  const char* v = kVarNames[rng() % 4];
  switch (rng() % (with_ml ? 7 : 6)) {
    case 0: return number(rng);
    case 1: return std::string(v) + "^" + number(rng);
    case 2: return "exp(" + linear(rng) + ")";
    case 3: return "sin(" + linear(rng) + ")";
    case 4: return "cos(" + linear(rng) + ")";
    case 5: return std::string("U(") + v + "-" + number(rng) + ")";
    default: {
      // Small coefficients keep the series inside its evaluation domain.
      const std::string g = rng() % 2 ? "0.5" : "0.75";
      return "ml(" + g + ";-" + (rng() % 2 ? "0.5" : "0.25") + "*" + v + "^" + g + ")";
    }
  }
}

// Grammar-valid function-domain text.
std::string random_expr(std::mt19937_64& rng, bool with_ml = true) {
  std::string s;
  const int terms = 1 + static_cast<int>(rng() % 3);
  for (int i = 0; i < terms; ++i) {
    if (i > 0) s += rng() % 2 ? " + " : " - ";
    const int factors = 1 + static_cast<int>(rng() % 3);
    // At most one trig or Mittag-Leffler factor per term stays inside the algebra.
    bool special = false;
    auto is_special = [](const std::string& a) {
      return a.rfind("sin", 0) == 0 || a.rfind("cos", 0) == 0 || a.rfind("ml", 0) == 0;
    };
    for (int k = 0; k < factors; ++k) {
      std::string a = atom(rng, with_ml);
      while (special && is_special(a)) a = atom(rng, with_ml);
      special = special || is_special(a);
      s += (k ? "*" : "") + a;
    }
  }
  return s;
}

Point4 random_point4(std::mt19937_64& rng, double hi) {
  return {uniform(rng, 0, hi), uniform(rng, 0, hi), uniform(rng, 0, hi), uniform(rng, 0, hi)};
}

}  // namespace

TEST_SUITE("expr-core") {
  TEST_CASE("parse builds the documented structures") {
    const Expr e = parse_expr("exp(q+r+s+t)");
    REQUIRE(e.terms().size() == 1);
    CHECK(e.terms()[0].coeff == 1);
    REQUIRE(e.terms()[0].factors.size() == 1);
    const auto* ex = std::get_if<Exponential>(&e.terms()[0].factors[0]);
    REQUIRE(ex);
    CHECK(ex->form.coeff == std::array<double, 4>{1, 1, 1, 1});

    const Expr ml = parse_expr("sin(q)*sin(r)*sin(s)*ml(0.5; -t^0.5)");
    REQUIRE(ml.terms().size() == 1);
    CHECK(ml.terms()[0].factors.size() == 4);
    CHECK(ml.to_string() == "sin(q)*sin(r)*sin(s)*ml(0.5;-t^0.5)");
    const auto* m = std::get_if<MittagLeffler>(&ml.terms()[0].factors[3]);
    REQUIRE(m);
    CHECK(m->gamma == 0.5);
    CHECK(m->beta == 1);
    CHECK(m->c == -1);
    CHECK(m->var == Var::t);

    const Expr two = parse_expr("q^2*r - 3*t");
    REQUIRE(two.terms().size() == 2);
    CHECK(canonical_equal(two, Expr::var(Var::q) * Expr::var(Var::q) * Expr::var(Var::r) - 3.0 * Expr::var(Var::t)));
  }

  TEST_CASE("parse reports syntax errors with positions") {
    try {
      parse_expr("q+*r");
      FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
      CHECK(e.position() == 2);
      CHECK(e.kind() == ErrorKind::Syntax);
    }
    CHECK_THROWS_AS(parse_expr("sin(q"), SyntaxError);
    CHECK_THROWS_AS(parse_expr("foo(q)"), SyntaxError);
    CHECK_THROWS_AS(parse_expr("x+1"), SyntaxError);
    CHECK_THROWS_AS(parse_expr("ml(0.5; -t^0.7)"), SyntaxError);
    CHECK_THROWS_AS(parse_expr("sin(q*r)"), SyntaxError);
    try {
      parse_expr("q^-1");
      FAIL("expected an algebra error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Algebra);
    }
  }

  TEST_CASE("mixing function and transform symbols is a kind mismatch") {
    try {
      parse("q*h");
      FAIL("expected a kind mismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::KindMismatch);
    }
    CHECK_THROWS_AS(parse_expr("m/h"), Error);
    CHECK_THROWS_AS(parse_tf("exp(q)"), Error);
  }

  TEST_CASE("transform-domain parsing keeps factored denominators") {
    const TFExpr f = parse_tf("m*n*o*p/((h-m)*(j-n)*(k-o)*(l-p))");
    CHECK(f.to_string() == "m*n*o*p/((h-m)*(j-n)*(k-o)*(l-p))");
    CHECK(parse_tf("(l/p)^(alpha-1)/((l/p)^alpha+1)").has_alpha());
    CHECK(parse_tf("m*n*o*p/(h*j*k*l)*exp(-h/m-j/n-k/o-l/p)").to_string() ==
          "m*exp(-h/m)*n*exp(-j/n)*o*exp(-k/o)*p*exp(-l/p)/(h*j*k*l)");
    CHECK_THROWS_AS(parse_tf("m/(h+j)"), SyntaxError);
  }

  TEST_CASE("canonical_equal examples") {
    CHECK(canonical_equal(parse_expr("q*r"), parse_expr("r*q")));
    CHECK(canonical_equal(parse_expr("2*exp(q)+exp(q)"), parse_expr("3*exp(q)")));
    CHECK_FALSE(canonical_equal(parse_expr("2*exp(q)"), parse_expr("3*exp(q)")));
    const TFExpr a = parse_tf("m*n*o*p/(h*j*k*l)");
    const TFExpr b = parse_tf("(m*n*o*p*h)/(h^2*j*k*l)");
    CHECK(canonical_equal(a, b));
    std::mt19937_64 rng(5);
    for (int i = 0; i < 5; ++i) {
      ShehuPoint pt;
      for (int k = 0; k < 4; ++k) {
        pt.param[k] = uniform(rng, 0.5, 3);
        pt.mate[k] = uniform(rng, 0.5, 3);
      }
      CHECK(rel_err(a.eval(pt), b.eval(pt)) < 1e-13);
    }
  }

  TEST_CASE("eval examples") {
    CHECK(parse_expr("exp(q+r+s+t)").eval({0, 0, 0, 0}) == 1.0);
    CHECK(parse_expr("U(q-1,r-1,s-1,t-1)").eval({2, 2, 2, 0.5}) == 0.0);
    CHECK(parse_expr("U(q-1,r-1,s-1,t-1)").eval({2, 2, 2, 1.5}) == 1.0);
    const double h = std::numbers::pi / 2;
    CHECK(parse_expr("sin(q)*sin(r)*sin(s)*ml(1;-t)").eval({h, h, h, 1}) ==
          doctest::Approx(0.36787944117144233).epsilon(1e-14));
  }

  TEST_CASE("eval_tf examples") {
    CHECK(parse_tf("m*n*o*p/(h*j*k*l)").eval(ShehuPoint::uniform(1, 1)) == 1.0);
    CHECK(parse_tf("m*n*o*p/((h-m)*(j-n)*(k-o)*(l-p))").eval(ShehuPoint::uniform(2, 1)) == 1.0);
    const TFExpr ml = parse_tf("(l/p)^(alpha-1)/((l/p)^alpha+1)");
    CHECK(ml.eval(ShehuPoint::parse("l=2,p=1"), 1.0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(parse_tf("p/(l+p)").eval(ShehuPoint::parse("l=2,p=1")) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK_THROWS_AS(ml.eval(ShehuPoint::parse("l=2,p=1")), Error);  // alpha unbound
    try {
      parse_tf("m/(h-m)").eval(ShehuPoint::uniform(1, 1));
      FAIL("expected a pole");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Pole);
    }
  }

  TEST_CASE("growth_bound examples") {
    const GrowthBound a = growth_bound(parse_expr("exp(2*q-r)"));
    CHECK(a.rate == std::array<double, 4>{2, -1, 0, 0});
    const GrowthBound b = growth_bound(parse_expr("sin(q)*sin(r)*sin(s)*sin(t)"));
    CHECK(b.rate == std::array<double, 4>{0, 0, 0, 0});
    CHECK(b.M == 1);
    const GrowthBound c = growth_bound(parse_expr("q*exp(q)"));
    CHECK(c.rate[0] == doctest::Approx(1 + kPolynomialSlack));
    CHECK(std::isfinite(c.M));
    for (int i = 0; i <= 1000; ++i) {
      const double q = 0.1 * i;
      CHECK(q * std::exp(q) <= c.M * std::exp(c.rate[0] * q));
    }
    try {
      growth_bound(parse_expr("ml(0.5;t^0.5)"));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Domain);
    }
  }

  TEST_CASE("derivatives, traces and shifts") {
    const Expr f = parse_expr("q^2*exp(3*r)*sin(2*s)");
    CHECK(canonical_equal(f.derivative(Var::q), parse_expr("2*q*exp(3*r)*sin(2*s)")));
    CHECK(canonical_equal(f.derivative(Var::s, 2), parse_expr("-4*q^2*exp(3*r)*sin(2*s)")));
    CHECK(f.at_zero(Var::q).is_zero());
    CHECK(canonical_equal(parse_expr("ml(0.5;-t^0.5)").at_zero(Var::t), Expr::constant(1)));
    CHECK(canonical_equal(parse_expr("exp(q)").shifted({1, 0, 0, 0}), std::exp(-1.0) * parse_expr("exp(q)")));
    CHECK(canonical_equal(parse_expr("exp(q)*r").scaled({2, 3, 1, 1}), parse_expr("3*exp(2*q)*r")));
  }

  TEST_CASE("500 random strings survive print/parse round trip") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 500; ++i) {
      const std::string text = random_expr(rng);
      CAPTURE(text);
      const Expr a = parse_expr(text);
      const Expr b = parse_expr(a.to_string());
      CHECK(canonical_equal(a, b));
    }
  }

  TEST_CASE("canonicalization is deterministic and eval is linear") {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 200; ++i) {
      const Expr x = parse_expr(random_expr(rng));
      const Expr y = parse_expr(random_expr(rng));
      CHECK(parse_expr(x.to_string()).to_string() == x.to_string());
      CHECK(Expr(x.terms()) == x);
      const Point4 p = random_point4(rng, 2.0);
      const double sum = x.eval(p) + y.eval(p);
      CHECK(std::abs((x + y).eval(p) - sum) <= 1e-12 * std::max({1.0, std::abs(x.eval(p)), std::abs(y.eval(p))}));
    }
  }

  TEST_CASE("growth bound holds at 1000 sample points") {
    std::mt19937_64 rng(99);
    int checked = 0;
    while (checked < 1000) {
      // Mittag-Leffler atoms are only evaluable near the origin; see below.
      const Expr x = parse_expr(random_expr(rng, false));
      const GrowthBound g = growth_bound(x);
      for (int k = 0; k < 10; ++k, ++checked) {
        const Point4 p = random_point4(rng, 20.0);
        double envelope = g.M;
        for (int v = 0; v < 4; ++v) envelope *= std::exp(g.rate[v] * p[v]);
        CAPTURE(x.to_string());
        CHECK(std::abs(x.eval(p)) <= envelope * (1 + 1e-12));
      }
    }
    const Expr ml = parse_expr("exp(q)*ml(0.5;-t^0.5)");
    const GrowthBound g = growth_bound(ml);
    for (int i = 0; i <= 100; ++i) {
      const Point4 p{0.2 * i, 0, 0, 0.01 * i};
      CHECK(std::abs(ml.eval(p)) <= g.M * std::exp(g.rate[0] * p[0] + g.rate[3] * p[3]));
    }
  }
}
