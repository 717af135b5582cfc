#include <doctest.h>

#include <cctype>
#include <cmath>
#include <random>

#include "generators.hpp"
#include "rsode/expr.hpp"
#include "rsode/multi_series.hpp"
#include "rsode/series.hpp"

using namespace rsode;

namespace {

RealSeries random_series(std::mt19937& rng, int order, double c0 = 0.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(static_cast<std::size_t>(order) + 1);
  for (auto& x : c) x = u(rng);
  c[0] += c0;
  return RealSeries(c);
}

void check_equal(const RealSeries& a, const std::vector<double>& ref, double tol) {
  REQUIRE(a.order() + 1 == static_cast<int>(ref.size()));
  for (int k = 0; k <= a.order(); ++k) CHECK(std::abs(a[k] - ref[static_cast<std::size_t>(k)]) <= tol);
}

}  // namespace

TEST_CASE("arithmetic examples") {
  const RealSeries one_plus({1, 1, 0, 0, 0}), one_minus({1, -1, 0, 0, 0});
  check_equal(one_plus * one_minus, {1, 0, -1, 0, 0}, 0.0);
  const RealSeries a({0.3, -2, 5});
  check_equal(a + RealSeries::zero(2), a.coeffs(), 0.0);
  check_equal(reciprocal(RealSeries({1, -1, 0, 0})), {1, 1, 1, 1}, 1e-15);
  check_equal(reciprocal(RealSeries({2, 0, 0})), {0.5, 0, 0}, 0.0);
  CHECK_THROWS(reciprocal(RealSeries({0, 1, 0})));
}

TEST_CASE("mixed orders truncate to the smaller order") {
  const RealSeries a({1, 2, 3, 4}), b({1, 1});
  CHECK((a * b).order() == 1);
  CHECK((a + b).order() == 1);
}

TEST_CASE("multiplication matches brute-force convolution") {
  std::mt19937 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const RealSeries a = random_series(rng, 2), b = random_series(rng, 2);
    std::vector<double> ref(3, 0.0);
    for (int i = 0; i <= 2; ++i)
      for (int j = 0; j <= 2; ++j)
        if (i + j <= 2) ref[static_cast<std::size_t>(i + j)] += a[i] * b[j];
    check_equal(a * b, ref, 1e-15);
  }
}

TEST_CASE("compose examples") {
  const RealSeries s = taylor(parse("sin(t)"), 0.0, 3);
  check_equal(compose(s, RealSeries({0, 2, 0, 0})), {0, 2, 0, -4.0 / 3.0}, 1e-15);
  CHECK_THROWS(compose(s, RealSeries({1, 2, 0, 0})));
}

TEST_CASE("property: compose agrees with Taylor of the composed expression") {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 60; ++i) {
    const std::string outer = testing::random_smooth_text(rng, 3);
    const std::string inner = testing::random_smooth_text(rng, 2);
    const Expr inner_e = parse(inner);
    const double t0 = u(rng);
    const double x0 = eval_real(inner_e, t0);
    // outer(inner(t)) by textual substitution
    std::string composed;
    for (std::size_t j = 0; j < outer.size(); ++j) {
      const bool word = (j > 0 && std::isalpha(static_cast<unsigned char>(outer[j - 1]))) ||
                        (j + 1 < outer.size() && std::isalpha(static_cast<unsigned char>(outer[j + 1])));
      composed += outer[j] == 't' && !word ? "(" + inner + ")" : std::string(1, outer[j]);
    }
    const RealSeries ref = taylor(parse(composed), t0, 5);
    const RealSeries got = compose(taylor(parse(outer), x0, 5), taylor(inner_e, t0, 5));
    for (int k = 0; k <= 5; ++k) CHECK(std::abs(got[k] - ref[k]) <= 1e-12 * (1.0 + std::abs(ref[k])));
  }
}

TEST_CASE("truncated evaluation") {
  const RealSeries s({0, 1, 0, -1.0 / 6});
  const auto v = eval_truncated(s, 0.1);
  CHECK(v.value == doctest::Approx(0.1 - 0.001 / 6).epsilon(1e-15));
  CHECK(std::abs(v.value - std::sin(0.1)) < 1e-7);
  CHECK(eval_truncated(RealSeries::constant(2.5, 6), 0.37).value == 2.5);
  const auto s9 = eval_truncated(taylor(parse("sin(t)"), 0.0, 9), 0.1);
  CHECK(s9.remainder < 1e-9);
  CHECK(std::abs(s9.value - std::sin(0.1)) < 1e-15);
  CHECK(eval_derivative(taylor(parse("sin(t)"), 0.0, 12), 0.3) == doctest::Approx(std::cos(0.3)).epsilon(1e-14));
}

TEST_CASE("shifts") {
  const RealSeries a({0, 0, 3, 4});
  check_equal(shift_down(a, 2), {3, 4}, 0.0);
  check_equal(shift_up(RealSeries({1, 2, 3, 4}), 1), {0, 1, 2, 3}, 0.0);
  check_equal(derivative(RealSeries({1, 2, 3, 4})), {2, 6, 12}, 0.0);
}

TEST_CASE("property: elementary function identities") {
  std::mt19937 rng(4);
  for (int i = 0; i < 100; ++i) {
    const RealSeries a = random_series(rng, 8);
    const RealSeries pos = random_series(rng, 8, 3.0);
    const auto [s, c] = sin_cos(a);
    const RealSeries one = s * s + c * c;
    const RealSeries el = exp(log(pos));
    const RealSeries rr = pos * reciprocal(pos);
    const RealSeries sq = sqrt(pos) * sqrt(pos);
    const RealSeries p3 = pow(pos, 3.0);
    const RealSeries p3ref = pos * pos * pos;
    const RealSeries ph = pow(pos, 0.5);
    const RealSeries sqr = sqrt(pos);
    for (int k = 0; k <= 8; ++k) {
      const double d = k == 0 ? 1.0 : 0.0;
      CHECK(std::abs(one[k] - d) < 1e-12);
      CHECK(std::abs(rr[k] - d) < 1e-12);
      CHECK(std::abs(el[k] - pos[k]) < 1e-11);
      CHECK(std::abs(sq[k] - pos[k]) < 1e-11);
      CHECK(std::abs(p3[k] - p3ref[k]) < 1e-10);
      CHECK(std::abs(ph[k] - sqr[k]) < 1e-12);
    }
  }
}

TEST_CASE("complex series") {
  const ComplexSeries z({std::complex<double>(0, 1), 1.0, 0.0, 0.0});
  const ComplexSeries e = exp(z);
  // exp(i + t) = e^i (1 + t + t^2/2 + t^3/6)
  const std::complex<double> ei = std::exp(std::complex<double>(0, 1));
  CHECK(std::abs(e[3] - ei / 6.0) < 1e-15);
}

TEST_CASE("multivariate series") {
  // (1 + x)(2 + y) expanded jointly to order 2
  const MultiSeries x = MultiSeries::variable(0, 1.0, 2, 2);
  const MultiSeries y = MultiSeries::variable(1, 2.0, 2, 2);
  const MultiSeries p = x * y;
  const std::vector<int> e00{0, 0}, e10{1, 0}, e01{0, 1}, e11{1, 1}, e20{2, 0};
  CHECK(p.coeff(e00) == 2.0);
  CHECK(p.coeff(e10) == 2.0);
  CHECK(p.coeff(e01) == 1.0);
  CHECK(p.coeff(e11) == 1.0);
  CHECK(p.coeff(e20) == 0.0);
  const std::vector<std::string> names{"y1", "y2"};
  CHECK(monomial_text(e20, names) == "y1^2");
  const std::vector<std::string> vars{"t", "y1"};
  const Expr f = parse("sin(t) * exp(y1)", vars);
  const std::vector<MultiSeries> args{MultiSeries::variable(0, 0.0, 2, 3), MultiSeries::variable(1, 0.0, 2, 3)};
  const MultiSeries s = evaluate<MultiSeries>(f, args);
  const std::vector<int> e12{1, 2}, e30{3, 0};
  CHECK(s.coeff(e12) == doctest::Approx(0.5));
  CHECK(s.coeff(e30) == doctest::Approx(-1.0 / 6.0));
}
