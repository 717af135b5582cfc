#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <random>

#include "generators.hpp"
#include "rsode/errors.hpp"
#include "rsode/linear_rs.hpp"

using namespace rsode;

namespace {

const Complex I(0.0, 1.0);
constexpr double kPi = std::numbers::pi;

using Strings = std::vector<std::vector<std::string>>;

/// A(s) = A0 + s A1 + s^2 A2 with random real coefficients.
LinearRSSystem random_system(std::mt19937& rng, int n) {
  const Eigen::MatrixXd A0 = testing::random_matrix(rng, n, 0.6);
  const Eigen::MatrixXd A1 = testing::random_matrix(rng, n, 0.4);
  const Eigen::MatrixXd A2 = testing::random_matrix(rng, n, 0.2);
  Strings A(static_cast<std::size_t>(n), std::vector<std::string>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          testing::fmt(A0(i, j)) + " + " + testing::fmt(A1(i, j)) + "*s + " + testing::fmt(A2(i, j)) + "*s^2";
  return LinearRSSystem::from_strings(A);
}

double max_abs(const CMatrix& M) { return M.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("constant coefficients give the matrix exponential") {
  const auto scalar = LinearRSSystem::from_strings({{"1"}});
  const auto r = fundamental_solution(scalar, 0.0, 1.0, 1e-12);
  CHECK(std::abs(r.U(0, 0) - std::exp(-1.0)) < 1e-10);

  const auto zero = LinearRSSystem::from_strings({{"0", "0"}, {"0", "0"}});
  CHECK(max_abs(fundamental_solution(zero, 0.0, Complex(-0.5, 2.0), 1e-12).U - CMatrix::Identity(2, 2)) < 1e-14);

  const auto sys = LinearRSSystem::from_strings({{"0.3", "-1"}, {"0.5", "0.1"}});
  const Complex dz(-0.4, 1.3);
  CMatrix ref = (-dz * sys.A0()).exp();
  CHECK(max_abs(fundamental_solution(sys, 0.2, 0.2 + dz, 1e-12).U - ref) < 1e-10);
}

TEST_CASE("matrix exponential agrees with an independent implementation") {
  std::mt19937 rng(21);
  for (int n = 1; n <= 6; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      CMatrix X = testing::random_matrix(rng, n, 3.0).cast<Complex>() +
                  I * testing::random_matrix(rng, n, 3.0).cast<Complex>();
      const CMatrix ref = X.exp();
      CHECK(max_abs(matrix_exp(X) - ref) <= 1e-12 * (1.0 + max_abs(ref)));
    }
  }
}

TEST_CASE("monodromy examples") {
  const auto half = LinearRSSystem::from_strings({{"1/2"}});
  CHECK(std::abs(monodromy_at(half, 0.5, 1e-12).M(0, 0) + 1.0) < 1e-10);
  const auto zero = LinearRSSystem::from_strings({{"0"}});
  CHECK(std::abs(monodromy_at(zero, 0.5, 1e-12).M(0, 0) - 1.0) < 1e-14);

  const auto nilpotent = LinearRSSystem::from_strings({{"0", "s"}, {"0", "1"}});
  CMatrix ref(2, 2);
  ref << 1.0, -2.0 * kPi * I, 0.0, 1.0;
  CHECK(max_abs(monodromy_at(nilpotent, 1.0, 1e-12).M - ref) < 1e-8);
}

TEST_CASE("monodromy generator examples") {
  CHECK(max_abs(monodromy_generator(CMatrix::Zero(2, 2)) - CMatrix::Identity(2, 2)) < 1e-15);
  CMatrix D = CMatrix::Zero(2, 2);
  D(1, 1) = 1.0;
  CHECK(max_abs(monodromy_generator(D) - CMatrix::Identity(2, 2)) < 1e-13);
  CMatrix h(1, 1);
  h(0, 0) = 0.5;
  CHECK(std::abs(monodromy_generator(h)(0, 0) + 1.0) < 1e-14);
}

TEST_CASE("characteristic polynomial examples") {
  auto check = [](const CMatrix& M, std::vector<Complex> ref) {
    const auto c = conjugacy_invariants(M);
    REQUIRE(c.size() == ref.size());
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(c[i] - ref[i]) < 1e-12);
  };
  check(CMatrix::Identity(2, 2), {1.0, -2.0, 1.0});
  CMatrix N(2, 2);
  N << 1.0, -2.0 * kPi * I, 0.0, 1.0;
  check(N, {1.0, -2.0, 1.0});
  CMatrix D = CMatrix::Zero(2, 2);
  D(0, 0) = 2.0;
  D(1, 1) = 3.0;
  check(D, {1.0, -5.0, 6.0});
}

TEST_CASE("property: Cayley-Hamilton for the computed invariants") {
  std::mt19937 rng(22);
  for (int n = 1; n <= 6; ++n) {
    const CMatrix M = testing::random_matrix(rng, n, 1.0).cast<Complex>() +
                      I * testing::random_matrix(rng, n, 1.0).cast<Complex>();
    CHECK(max_abs(polynomial_at_matrix(conjugacy_invariants(M), M)) < 1e-11);
  }
}

TEST_CASE("inhomogeneous examples") {
  const auto sys = LinearRSSystem::from_strings({{"1"}}, {"1"});
  CVector y0(1);
  y0(0) = 0.5;
  CHECK(std::abs(solve_inhomogeneous(sys, 0.0, y0, std::log(2.0), 1e-12)(0) - 1.0) < 1e-10);

  const auto flat = LinearRSSystem::from_strings({{"0"}}, {"1"});
  y0(0) = 0.0;
  CHECK(std::abs(solve_inhomogeneous(flat, 0.0, y0, std::log(2.0), 1e-12)(0) - 1.0) < 1e-10);

  std::mt19937 rng(23);
  const auto hom = random_system(rng, 3);
  CVector v(3);
  v << 1.0, -2.0, 0.5;
  const Complex z1(-0.3, 0.8);
  const CVector ref = fundamental_solution(hom, 0.0, z1, 1e-12).U * v;
  CHECK((solve_inhomogeneous(hom, 0.0, v, z1, 1e-12) - ref).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("domain and shape validation") {
  CHECK_THROWS_AS(LinearRSSystem::from_strings({{"1/s"}}), ValidationError);
  CHECK_THROWS_AS(LinearRSSystem::from_strings({{"1", "0"}}), ValidationError);
  CHECK_THROWS_AS(LinearRSSystem::from_strings({{"1"}}, {"1", "2"}), ValidationError);
  CHECK_THROWS_AS(LinearRSSystem::from_strings({{"t"}}), ParseError);
  const auto bounded = LinearRSSystem::from_strings({{"1/(1-s)"}}, {}, 1.0);
  CHECK_THROWS_AS(monodromy_at(bounded, 1.0, 1e-10), ValidationError);
  CHECK_NOTHROW(monodromy_at(bounded, 0.5, 1e-10));
  CHECK_THROWS_AS(fundamental_solution(bounded, 0.0, Complex(0.1, 0.0), 1e-10), ValidationError);
}

TEST_CASE("property: conjugacy invariance along the circle radius") {
  std::mt19937 rng(24);
  for (int trial = 0; trial < 3; ++trial) {
    const auto sys = random_system(rng, 2);
    const auto c1 = monodromy_at(sys, 0.3, 1e-12).charpoly;
    const auto c2 = monodromy_at(sys, 0.8, 1e-12).charpoly;
    for (std::size_t i = 0; i < c1.size(); ++i) CHECK(std::abs(c1[i] - c2[i]) < 1e-8);
  }
}

TEST_CASE("property: first-order decay at the puncture") {
  std::mt19937 rng(25);
  for (int trial = 0; trial < 3; ++trial) {
    const auto sys = random_system(rng, 2);
    const CMatrix M0 = monodromy_generator(sys.A0());
    const double d2 = max_abs(monodromy_at(sys, 1e-2, 1e-13).M - M0);
    const double d3 = max_abs(monodromy_at(sys, 1e-3, 1e-13).M - M0);
    const double a1 = (sys.A_at(1e-6) - sys.A_at(-1e-6)).norm() / 2e-6;
    const double a_sup = sys.A_at(1e-3).norm() + sys.A_at(-1e-3).norm();
    CHECK(d3 < 10 * 1e-3 * a1 * std::exp(2 * kPi * a_sup));
    // M(sigma) - M(0) = sigma C + O(sigma^2)
    CHECK(d3 / d2 > 0.09);
    CHECK(d3 / d2 < 0.11);
  }
}

TEST_CASE("property: cocycle identity") {
  std::mt19937 rng(26);
  const Complex z0(-0.2, 0.1), z(-0.5, 1.1), shift(0.0, 2.0 * kPi);
  for (int trial = 0; trial < 3; ++trial) {
    const auto sys = random_system(rng, 2);
    const CMatrix Uz = fundamental_solution(sys, z0, z, 1e-12).U;
    const CMatrix Uzs = fundamental_solution(sys, z0, z + shift, 1e-12).U;
    const CMatrix U0s = fundamental_solution(sys, z0, z0 + shift, 1e-12).U;
    CHECK(max_abs(Uzs - Uz * U0s) < 1e-8);
  }
}
