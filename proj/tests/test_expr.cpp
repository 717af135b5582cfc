#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "generators.hpp"
#include "rsode/errors.hpp"
#include "rsode/expr.hpp"

using namespace rsode;

namespace {

double at(const std::string& text, double t) { return eval_real(parse(text), t); }

/// Richardson-extrapolated central difference.
double central_fd(const Expr& e, double t) {
  auto d = [&](double h) { return (eval_real(e, t + h) - eval_real(e, t - h)) / (2.0 * h); };
  const double h = 1e-3 * (1.0 + std::abs(t));
  return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

}  // namespace

TEST_CASE("parse builds the expected nodes") {
  const Expr e = parse("t^2");
  CHECK(e.kind() == ExprKind::Power);
  CHECK(e.exponent() == 2.0);
  CHECK(e.lhs().kind() == ExprKind::Variable);
  CHECK(parse("pi").is_constant(std::numbers::pi));
  CHECK(parse("  -t ").kind() == ExprKind::Negate);
}

TEST_CASE("precedence and associativity") {
  CHECK(at("2^3^2", 0.0) == doctest::Approx(512.0));
  CHECK(at("-2^2", 0.0) == doctest::Approx(-4.0));
  CHECK(at("1 - 2 - 3", 0.0) == doctest::Approx(-4.0));
  CHECK(at("8 / 4 / 2", 0.0) == doctest::Approx(1.0));
  CHECK(at("2 * t + 3 * t^2", 2.0) == doctest::Approx(16.0));
  CHECK(at("t^-1", 4.0) == doctest::Approx(0.25));
}

TEST_CASE("evaluation examples") {
  CHECK(at("sin(t)^2", std::numbers::pi / 4) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(at("t^2 + 1", 2.0) == 5.0);
  const std::complex<double> i(0.0, 1.0);
  CHECK(eval_complex(parse("t"), i) == i);
  CHECK(std::abs(eval_complex(parse("exp(pi * t)"), i) + 1.0) < 1e-15);
  CHECK(at("sinh(t) - (exp(t) - exp(-t)) / 2", 0.7) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(at("1/t", 0.0), DomainError);
  CHECK_THROWS_AS(at("log(t)", 0.0), DomainError);
  CHECK_THROWS_AS(at("log(t)", -1.0), DomainError);
  CHECK_THROWS_AS(at("sqrt(t)", -1.0), DomainError);
  CHECK_THROWS_AS(at("t^0.5", -1.0), DomainError);
  CHECK(at("t^3", -2.0) == -8.0);
  CHECK_THROWS_AS(eval_complex(parse("1/t"), 0.0), DomainError);
  CHECK_THROWS_AS(taylor(parse("log(t)"), 0.0, 3), DomainError);
  CHECK_THROWS_AS(taylor(parse("sqrt(t)"), 0.0, 3), DomainError);
}

TEST_CASE("parse errors carry a location") {
  try {
    parse("log(");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 5);
    CHECK_FALSE(e.expected().empty());
  }
  try {
    parse("1 +\n  x");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
  CHECK_THROWS_AS(parse("(t"), ParseError);
  CHECK_THROWS_AS(parse("t)"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("foo(t)"), ParseError);
  CHECK_THROWS_AS(parse("t^t"), ParseError);
  CHECK_THROWS_AS(parse("2 $ 3"), ParseError);
}

TEST_CASE("multi-variable parsing") {
  const std::vector<std::string> names{"t", "y1", "y2"};
  const Expr e = parse("t * y1 - y2^2", names);
  CHECK(e.max_variable() == 2);
  const std::vector<double> v{2.0, 3.0, 4.0};
  CHECK(evaluate<double>(e, v) == -10.0);
  CHECK_THROWS_AS(parse("y3", names), ParseError);
}

TEST_CASE("derivative examples") {
  const std::vector<double> pts{-1.3, 0.2, 0.9, 2.4};
  for (double t : pts) {
    CHECK(eval_real(differentiate(parse("t^2")), t) == doctest::Approx(2 * t));
    CHECK(eval_real(differentiate(parse("sin(t)^2")), t) == doctest::Approx(2 * std::sin(t) * std::cos(t)));
  }
  const Expr d = differentiate(parse("3"));
  CHECK(d.is_constant(0.0));
  CHECK(render(d) == "0");
}

TEST_CASE("Taylor examples") {
  const RealSeries s = taylor(parse("sin(t)"), 0.0, 5);
  const std::vector<double> sin_ref{0, 1, 0, -1.0 / 6, 0, 1.0 / 120};
  for (int k = 0; k <= 5; ++k) CHECK(s[k] == doctest::Approx(sin_ref[static_cast<std::size_t>(k)]).epsilon(1e-15));
  const RealSeries q = taylor(parse("t^2"), 0.0, 4);
  const std::vector<double> sq{0, 0, 1, 0, 0};
  for (int k = 0; k <= 4; ++k) CHECK(q[k] == sq[static_cast<std::size_t>(k)]);
  const RealSeries g = taylor(parse("1/(1-t)"), 0.0, 3);
  for (int k = 0; k <= 3; ++k) CHECK(g[k] == doctest::Approx(1.0));
  const ComplexSeries z = taylor_complex(parse("exp(t)"), 0.0, 4);
  CHECK(std::abs(z[4] - 1.0 / 24) < 1e-16);
}

TEST_CASE("render round trip") {
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    const Expr e = parse(testing::random_smooth_text(rng, 4));
    const std::string text = render(e);
    const Expr back = parse(text);
    CHECK(render(back) == text);
    for (double t : {-1.1, 0.3, 1.7}) CHECK(eval_real(back, t) == eval_real(e, t));
  }
  CHECK(eval_real(parse(render(Expr::constant(-0.1))), 0.0) == -0.1);
  CHECK(eval_real(parse(render(Expr::constant(1.0 / 3.0))), 0.0) == 1.0 / 3.0);
}

TEST_CASE("property: derivative agrees with finite differences") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 300; ++i) {
    const Expr e = parse(testing::random_smooth_text(rng, 4));
    const Expr d = differentiate(e);
    const double t = u(rng);
    const double exact = eval_real(d, t);
    CHECK(std::abs(exact - central_fd(e, t)) <= 1e-6 * (1.0 + std::abs(exact)));
  }
}

TEST_CASE("property: Taylor truncation error scales with the order") {
  std::mt19937 rng(3);
  int checked = 0;
  for (int i = 0; i < 60 && checked < 25; ++i) {
    const Expr e = parse(testing::random_smooth_text(rng, 3));
    const int K = 4;
    const RealSeries s = taylor(e, 0.4, K);
    const double e1 = std::abs(eval_truncated(s, 0.02).value - eval_real(e, 0.42));
    const double e2 = std::abs(eval_truncated(s, 0.01).value - eval_real(e, 0.41));
    // skip cases whose leading error term vanishes or drowns in roundoff
    if (e1 < 1e-12 || e2 < 1e-13) continue;
    const double ratio = e2 / e1;
    const double expected = std::pow(2.0, -(K + 1));
    CHECK(ratio > expected / 4.0);
    CHECK(ratio < expected * 4.0);
    ++checked;
  }
  CHECK(checked >= 10);
}

TEST_CASE("property: Taylor coefficients match repeated differentiation") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 50; ++i) {
    const Expr e = parse(testing::random_smooth_text(rng, 3));
    const double t0 = u(rng);
    const RealSeries s = taylor(e, t0, 3);
    Expr d = e;
    double fact = 1.0;
    for (int k = 0; k <= 3; ++k) {
      if (k > 0) {
        d = differentiate(d);
        fact *= k;
      }
      const double ref = eval_real(d, t0) / fact;
      CHECK(std::abs(s[k] - ref) <= 1e-11 * (1.0 + std::abs(ref)));
    }
  }
}

TEST_CASE("complex and series evaluation agree with real evaluation") {
  std::mt19937 rng(9);
  for (int i = 0; i < 50; ++i) {
    const Expr e = parse(testing::random_smooth_text(rng, 3));
    const double r = eval_real(e, 0.37);
    CHECK(std::abs(eval_complex(e, 0.37) - r) <= 1e-13 * (1.0 + std::abs(r)));
    CHECK(taylor(e, 0.37, 2)[0] == doctest::Approx(r).epsilon(1e-13));
  }
}
