#pragma once

// Linear regular-singular systems dY/ds + A(s) Y / s = h(s), solved on the
// logarithmic cover s = e^z where they become dY/dz + A(e^z) Y = e^z h(e^z).

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "rsode/expr.hpp"

namespace rsode {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr int kMaxLinearDim = 64;

class LinearRSSystem {
 public:
  /// A is n x n, h has n entries or is empty (homogeneous). Expressions are
  /// in the single variable s. Throws ValidationError when A is not analytic
  /// at s = 0, when shapes disagree, or when n > 64.
  LinearRSSystem(std::vector<std::vector<Expr>> A, std::vector<Expr> h = {},
                 double rho = std::numeric_limits<double>::infinity());

  /// Parses entries with variable name "s".
  static LinearRSSystem from_strings(const std::vector<std::vector<std::string>>& A,
                                     const std::vector<std::string>& h = {},
                                     double rho = std::numeric_limits<double>::infinity());

  int dim() const noexcept { return n_; }
  double rho() const noexcept { return rho_; }
  bool homogeneous() const noexcept { return h_.empty(); }
  const std::vector<std::vector<Expr>>& A() const noexcept { return A_; }
  const std::vector<Expr>& h() const noexcept { return h_; }

  CMatrix A_at(Complex s) const;
  CVector h_at(Complex s) const;
  CMatrix A0() const { return A_at(0.0); }

 private:
  int n_;
  double rho_;
  std::vector<std::vector<Expr>> A_;
  std::vector<Expr> h_;
};

inline const std::vector<std::string>& linear_variables() {
  static const std::vector<std::string> names{"s"};
  return names;
}

struct FundamentalResult {
  CMatrix U;
  double condition = 0.0;  // 2-norm condition number of U
  long steps = 0;
  double est_error = 0.0;
};

/// U(z1) for dU/dz + A(e^z) U = 0, U(z0) = I, along the straight segment.
FundamentalResult fundamental_solution(const LinearRSSystem& sys, Complex z0, Complex z1, double tol);

struct MonodromyResult {
  double sigma = 0.0;
  CMatrix M;
  std::vector<Complex> charpoly;  // leading coefficient first
  long path_steps = 0;
  double est_error = 0.0;
};

/// Integrates dU/dtheta = -i A(sigma e^{i theta}) U over [0, 2 pi] from I.
MonodromyResult monodromy_at(const LinearRSSystem& sys, double sigma, double tol);

/// exp(X) by scaling and squaring with a Taylor kernel (scaled norm < 0.5).
CMatrix matrix_exp(const CMatrix& X);

/// exp(-2 pi i A0): the limit of the monodromy at the puncture.
CMatrix monodromy_generator(const CMatrix& A0);

/// Coefficients of det(xI - M), leading first (Faddeev-LeVerrier).
std::vector<Complex> conjugacy_invariants(const CMatrix& M);

/// p(M) for coefficients given leading first.
CMatrix polynomial_at_matrix(const std::vector<Complex>& coeffs, const CMatrix& M);

/// Value at z1 of the solution of dY/dz + A(e^z) Y = e^z h(e^z), Y(z0) = Y0.
/// The state is augmented with U, U^{-1} and the running quadrature.
CVector solve_inhomogeneous(const LinearRSSystem& sys, Complex z0, const CVector& Y0, Complex z1,
                            double tol);

}  // namespace rsode
