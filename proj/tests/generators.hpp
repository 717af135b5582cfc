#pragma once

// Hand-rolled generators for property tests.

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <string>

namespace rsode::testing {

/// Random expression text in t that is analytic and finite on all of R.
/// Exponentials only see bounded arguments and every quotient or logarithm
/// is guarded by 1 + x^2.
inline std::string random_smooth_text(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 11);
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  auto sub = [&] { return random_smooth_text(rng, depth - 1); };
  auto num = [&] {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", c(rng));
    return std::string(buf[0] == '-' ? "(" : "") + buf + (buf[0] == '-' ? ")" : "");
  };
  switch (pick(rng)) {
    case 0: return "t";
    case 1: return num();
    case 2: return "(" + sub() + " + " + sub() + ")";
    case 3: return "(" + sub() + " - " + sub() + ")";
    case 4: return "(" + sub() + " * " + sub() + ")";
    case 5: { const std::string b = sub(); return "(" + sub() + " / (1 + (" + b + ")^2))"; }
    case 6: return "sin(" + sub() + ")";
    case 7: return "cos(" + sub() + ")";
    case 8: return "exp(sin(" + sub() + "))";
    case 9: { const std::string a = sub(); return "log(1 + (" + a + ")^2)"; }
    case 10: return "tanh(" + sub() + ")";
    default: { const std::string a = sub(); return "sqrt(2 + (" + a + ")^2)"; }
  }
}

inline Eigen::MatrixXd random_matrix(std::mt19937& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = u(rng);
  return M;
}

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return x < 0 ? "(" + std::string(buf) + ")" : std::string(buf);
}

}  // namespace rsode::testing
