#include <doctest.h>

#include <cmath>
#include <random>

#include "shehu/error.hpp"
#include "shehu/parser.hpp"
#include "shehu/special.hpp"
#include "support.hpp"

using namespace shehu;
using shehu::test::rel_err;

TEST_SUITE("special-fn") {
  TEST_CASE("gamma values") {
    CHECK(shehu::gamma(1) == 1);
    CHECK(shehu::gamma(5) == doctest::Approx(24).epsilon(1e-15));
    CHECK(shehu::gamma(1.5) == doctest::Approx(0.88622692545275801).epsilon(1e-15));
    CHECK(shehu::gamma(0.5) == doctest::Approx(1.7724538509055160).epsilon(1e-15));
    CHECK(log_gamma(100) == doctest::Approx(359.13420536957540).epsilon(1e-14));
    CHECK_THROWS_AS(shehu::gamma(0), Error);
    CHECK_THROWS_AS(shehu::gamma(-2), Error);
  }

  TEST_CASE("Mittag-Leffler values") {
    CHECK(mittag_leffler(1, 1, 1) == doctest::Approx(2.7182818284590452).epsilon(1e-15));
    CHECK(mittag_leffler(0.5, 1, 0) == 1);
    CHECK(mittag_leffler(2, 1, -2.25) == doctest::Approx(0.070737201667702906).epsilon(1e-12));
    // E_{1/2}(-1) = e * erfc(1)
    CHECK(mittag_leffler(0.5, 1, -1) == doctest::Approx(0.42758357615580700).epsilon(1e-13));
    // E_{1,2}(z) = (e^z - 1)/z
    CHECK(mittag_leffler(1, 2, 0.5) == doctest::Approx((std::exp(0.5) - 1) / 0.5).epsilon(1e-14));
  }

  TEST_CASE("Mittag-Leffler domain guard") {
    for (MLParams p : {MLParams{0.5, 1, 11}, MLParams{0.2, 1, 0.5}, MLParams{0.5, 0, 0.5}, MLParams{0.5, 1, -9}}) {
      CAPTURE(p.z);
      try {
        mittag_leffler(p);
        FAIL("expected a domain error");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Domain);
      }
    }
  }

  TEST_CASE("E_1 is exp and E_2(-x^2) is cos") {
    for (int i = 0; i <= 100; ++i) {
      const double z = -5 + 0.1 * i;
      CHECK(std::abs(mittag_leffler(1, 1, z) - std::exp(z)) <= 1e-10 * std::exp(z));
    }
    for (int i = 0; i <= 60; ++i) {
      const double x = 0.05 * i;
      CHECK(std::abs(mittag_leffler(2, 1, -x * x) - std::cos(x)) <= 1e-10);
    }
  }

  TEST_CASE("halving the truncation threshold is invisible") {
    for (double g : {0.3, 0.5, 0.8, 1.0, 1.7}) {
      for (double z : {-1.0, -0.5, -0.2, 0.4, 2.0}) {
        CAPTURE(g);
        CAPTURE(z);
        MLParams p{g, 1, z};
        const double a = mittag_leffler(p), b = mittag_leffler(p, 0.5e-16);
        CHECK(rel_err(b, a) < 1e-12);
      }
    }
    // Small indices with larger arguments exhaust the 200-term budget.
    CHECK_THROWS_AS(mittag_leffler(0.3, 1, -3), Error);
  }

  TEST_CASE("Riemann-Liouville integral values") {
    const Point4 at2{0, 0, 0, 2}, at1{0, 0, 0, 1};
    CHECK(rl_integral(parse_expr("1"), 1.0, Var::t, at2) == doctest::Approx(2).epsilon(1e-13));
    CHECK(rl_integral(parse_expr("1"), 0.5, Var::t, at1) == doctest::Approx(1.1283791670955126).epsilon(1e-12));
    CHECK(rl_integral(parse_expr("t"), 0.5, Var::t, at1) == doctest::Approx(0.75225277806367508).epsilon(1e-12));
  }

  TEST_CASE("Caputo derivative values") {
    const Point4 at1{0.3, 0.7, 1.1, 1};
    CHECK(std::abs(caputo(parse_expr("4.5"), {0.5, Var::t}, at1)) < 1e-14);
    CHECK(caputo(parse_expr("t"), {0.5, Var::t}, at1) == doctest::Approx(1.1283791670955126).epsilon(1e-10));
    CHECK(caputo(parse_expr("ml(0.5;-t^0.5)"), {0.5, Var::t}, at1) ==
          doctest::Approx(-0.42758357615580700).epsilon(1e-7));
    // Only the chosen variable is differentiated.
    CHECK(caputo(parse_expr("q*t"), {0.5, Var::t}, at1) == doctest::Approx(0.3 * 1.1283791670955126).epsilon(1e-10));
  }

  TEST_CASE("Caputo of t^k matches the power rule") {
    for (int k = 1; k <= 3; ++k)
      for (double a : {0.3, 0.5, 0.9})
        for (double t : {0.5, 1.0, 2.0}) {
          const Expr f = Expr::atom(Power{Var::t, static_cast<double>(k)});
          const double want = shehu::gamma(k + 1.0) / shehu::gamma(k + 1.0 - a) * std::pow(t, k - a);
          CHECK(rel_err(caputo(f, {a, Var::t}, {0, 0, 0, t}), want) < 1e-7);
        }
  }

  TEST_CASE("semigroup: J^0.5 J^0.5 = J^1") {
    for (const char* text : {"1", "t", "exp(-t)", "sin(t)", "t^2*exp(t)"}) {
      CAPTURE(text);
      const Expr f = parse_expr(text);
      for (double x : {0.5, 1.5}) {
        auto inner = [&](double tau) { return rl_integral(f, 0.5, Var::t, {0, 0, 0, tau}); };
        const double twice = rl_integral(inner, 0.5, x, 0.5);
        const double once = rl_integral(f, 1.0, Var::t, {0, 0, 0, x});
        CHECK(rel_err(twice, once) < 1e-6);
      }
    }
  }

  TEST_CASE("Caputo of order 1 is the first derivative") {
    const char* corpus[] = {"t^2",      "exp(2*t)",        "sin(3*t)",   "cos(t)*q", "t^3*exp(-t)",
                            "t*sin(t)", "exp(q-t)*r",      "t^2.5",      "cos(2*t+s)", "ml(0.5;-t^0.5)*s"};
    std::mt19937_64 rng(3);
    for (const char* text : corpus) {
      CAPTURE(text);
      const Expr f = parse_expr(text);
      const Point4 p{shehu::test::uniform(rng, 0, 2), shehu::test::uniform(rng, 0, 2),
                     shehu::test::uniform(rng, 0, 2), shehu::test::uniform(rng, 0.2, 2)};
      CHECK(rel_err(caputo(f, {1.0, Var::t}, p), f.derivative(Var::t).eval(p)) < 1e-9);
    }
  }

  TEST_CASE("Caputo eigenfunction identity") {
    for (double a : {0.3, 0.5, 0.8}) {
      const Expr f = Expr::atom(MittagLeffler{a, 1, -1, Var::t});
      for (double t : {0.5, 1.0, 2.0}) {
        CAPTURE(a);
        CAPTURE(t);
        const double d = caputo(f, {a, Var::t}, {0, 0, 0, t});
        CHECK(std::abs(d + mittag_leffler(a, 1, -std::pow(t, a))) < 1e-6);
      }
    }
  }

  TEST_CASE("fractional order above one uses two boundary derivatives") {
    FracSpec s{1.5, Var::t};
    CHECK(s.n() == 2);
    CHECK(FracSpec{1.0, Var::t}.n() == 1);
    // D^1.5 t^2 = Gamma(3)/Gamma(1.5) t^0.5
    CHECK(caputo(parse_expr("t^2"), s, {0, 0, 0, 1}) == doctest::Approx(2 / shehu::gamma(1.5)).epsilon(1e-9));
  }
}
