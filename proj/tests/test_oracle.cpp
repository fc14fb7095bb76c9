#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "shehu/error.hpp"
#include "shehu/oracle.hpp"
#include "shehu/parser.hpp"
#include "shehu/pde.hpp"
#include "shehu/transform.hpp"
#include "shehu/verify.hpp"
#include "support.hpp"

using namespace shehu;
using shehu::test::rel_err;

TEST_SUITE("numeric-oracle") {
  TEST_CASE("quadrature values") {
    const ShehuPoint ones = ShehuPoint::uniform(1, 1);
    CHECK(shehu_numeric(parse_expr("1"), ones) == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(shehu_numeric(parse_expr("exp(-q-r-s-t)"), ones) == doctest::Approx(0.0625).epsilon(1e-11));
    CHECK(shehu_numeric(parse_expr("sin(q)"), ones, VarSet::parse("q")) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(shehu_numeric(parse_expr("t^0.5"), ShehuPoint::parse("l=2,p=1"), VarSet::parse("t")) ==
          doctest::Approx(std::sqrt(std::acos(-1.0)) / 2 / std::pow(2.0, 1.5)).epsilon(1e-9));
  }

  TEST_CASE("oracle refuses points without decay margin") {
    try {
      shehu_numeric(parse_expr("exp(2*q)"), ShehuPoint::parse("h=2,m=1"));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::OutsideRegion);
    }
    CHECK_THROWS_AS(shehu_numeric(parse_expr("r"), ShehuPoint::uniform(1, 1), VarSet::parse("q")), Error);
  }

  TEST_CASE("convolution4 values") {
    CHECK(convolution4(parse_expr("1"), parse_expr("1"), {1, 1, 1, 1}) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(convolution4(parse_expr("1"), parse_expr("1"), {2, 1, 1, 1}) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(convolution4(parse_expr("exp(q)"), Expr{}, {1, 2, 3, 4}) == 0);
    // (e^q **** 1)(x) = (e^q - 1) r s t
    CHECK(convolution4(parse_expr("exp(q)"), parse_expr("1"), {1, 0.5, 2, 1}) ==
          doctest::Approx((std::exp(1.0) - 1) * 0.5 * 2).epsilon(1e-12));
  }

  TEST_CASE("convolution4 is symmetric") {
    const char* pairs[][2] = {{"exp(q-r)", "sin(s)*t"}, {"q^2*cos(t)", "exp(r+s)"}, {"ml(0.5;-t^0.5)", "q*r"}};
    for (auto& pr : pairs) {
      const Expr f = parse_expr(pr[0]), g = parse_expr(pr[1]);
      for (const Point4& x : {Point4{1, 1, 1, 1}, Point4{0.5, 2, 1.5, 0.7}})
        CHECK(rel_err(convolution4(f, g, x), convolution4(g, f, x)) < 1e-10);
    }
  }

  TEST_CASE("factorized convolution oracle agrees with the direct 4D rule") {
    // The Shehu oracle evaluates f **** g through one-dimensional convolutions;
    // spot-check those against the tensor rule.
    const Expr f = parse_expr("exp(q-r+0.5*s)"), g = parse_expr("exp(-q+t)");
    const Point4 x{0.8, 1.3, 0.4, 1.1};
    // (e^{aq} * e^{bq})(x) = (e^{ax} - e^{bx})/(a-b), or x e^{ax} when a = b.
    auto one = [](double a, double b, double x) { return a == b ? x * std::exp(a * x) : (std::exp(a * x) - std::exp(b * x)) / (a - b); };
    const double want = one(1, -1, x[0]) * one(-1, 0, x[1]) * one(0.5, 0, x[2]) * one(0, 1, x[3]);
    CHECK(rel_err(convolution4(f, g, x), want) < 1e-12);
    const ShehuPoint pt = ShehuPoint::uniform(3, 1);
    CHECK(rel_err(shehu_numeric_convolution(f, g, pt), convolution(forward(f), forward(g)).eval(pt)) < 1e-8);
  }

  TEST_CASE("self-convergence on the non-oscillatory corpus") {
    const char* corpus[] = {"1",           "q*r*s*t",      "exp(q-2*r+0.5*s+t)", "q^2*exp(-r)+3*s*t",
                            "t^0.5*q^1.5", "ml(0.5;-t^0.5)", "exp(q+r+s+t)*U(q-1,t-0.5)"};
    std::mt19937_64 rng(4);
    for (const char* text : corpus) {
      CAPTURE(text);
      const Expr f = parse_expr(text);
      for (int i = 0; i < 3; ++i) {
        // Mittag-Leffler integrands need strong decay: the series is only
        // evaluable for moderate arguments.
        const ShehuPoint pt = random_point(rng, region_rates(f), 4, 6);
        QuadratureSpec base, fine;
        fine.nodes_per_axis = 2 * base.nodes_per_axis;
        CHECK(rel_err(shehu_numeric(f, pt, VarSet::all(), fine), shehu_numeric(f, pt, VarSet::all(), base)) < 1e-9);
      }
    }
  }

  TEST_CASE("all 24 axis orders agree") {
    const char* cases[] = {"exp(q-r)*s^2*cos(t)", "q*r*s*t", "sin(q)*exp(-s)*t^0.5", "sin(q+r)*exp(-s)*t"};
    const ShehuPoint pt = ShehuPoint::parse("h=2.5,j=3,k=2,l=1.5,m=1,n=1.2,o=0.8,p=1");
    for (const char* text : cases) {
      CAPTURE(text);
      const Expr f = parse_expr(text);
      std::array<int, 4> order{0, 1, 2, 3};
      const double ref = shehu_numeric(f, pt);
      int count = 0;
      do {
        QuadratureSpec spec;
        spec.axis_order = order;
        CHECK(rel_err(shehu_numeric(f, pt, VarSet::all(), spec), ref) < 1e-10);
        ++count;
      } while (std::next_permutation(order.begin(), order.end()));
      CHECK(count == 24);
    }
  }

  TEST_CASE("PDE residual examples") {
    const PdeProblem p2 = load_problem(shehu::test::data_file("example2.pde"));
    const ResidualReport r2 = pde_residual(p2, parse_expr("exp(q+r+s+t)"));
    CHECK(r2.max_abs_residual <= 1e-9);
    CHECK(r2.residuals.size() == 10);
    for (const Point4& x : r2.sample_points)
      for (double v : x) CHECK((v >= 0.1 && v <= 2.0));
    const PdeProblem p3 = load_problem(shehu::test::data_file("example3.pde"));
    CHECK(pde_residual(p3, parse_expr("exp(-2*q+r-2*s+t)")).max_abs_residual <= 1e-9);
    const PdeProblem p1 = load_problem(shehu::test::data_file("example1.pde"));
    CHECK(pde_residual(p1, parse_expr("sin(q)*sin(r)*sin(s)*ml(0.5;-t^0.5)")).max_abs_residual <= 1e-4);
    // A wrong candidate is detected.
    CHECK(pde_residual(p2, parse_expr("exp(q+r+s)")).max_abs_residual > 1e-3);
  }

  TEST_CASE("residual sampling is seeded") {
    const PdeProblem p2 = load_problem(shehu::test::data_file("example2.pde"));
    const Expr w = parse_expr("exp(q+r+s)");
    const ResidualReport a = pde_residual(p2, w, {}, 10, 7), b = pde_residual(p2, w, {}, 10, 7),
                         c = pde_residual(p2, w, {}, 10, 8);
    CHECK(a.sample_points == b.sample_points);
    CHECK(a.residuals == b.residuals);
    CHECK(a.sample_points != c.sample_points);
  }
}
