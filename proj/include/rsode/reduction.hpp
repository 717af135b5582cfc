#pragma once

// Tools for systems written as 0 = Y' + f(xi, Y) / xi: limit conditions,
// the forced derivative at xi = 0, the hat reduction Y = Y0 + xi * Yhat,
// shifting to the origin and the weak-nonlinearity test.

#include <complex>
#include <string>
#include <vector>

#include "rsode/field.hpp"
#include "rsode/singular_ivp.hpp"

namespace rsode {

struct LimitCheck {
  double residual_norm = 0.0;  // ||f(0, Y0)||
  bool pass = false;
};

/// Necessary condition f(0, Y0) = 0 for a continuous limit at xi = 0.
LimitCheck continuation_limit_check(const Field& f, const VectorXd& Y0);

struct InitialDerivative {
  VectorXd Y1;
  VectorXd a0;  // df/dxi (0, Y0)
  MatrixXd A0;  // df/dY (0, Y0)
  /// Eigenvalues of I + A0, reported only.
  std::vector<std::complex<double>> spectrum;
};

/// Y1 = -(I + A0)^{-1} a0. Throws ValidationError if f(0, Y0) != 0 and
/// NumericalError if I + A0 is singular.
InitialDerivative initial_derivative(const Field& f, const VectorXd& Y0);

/// f~(xi, Y~) = f(xi, Y~ + Y0).
FieldPtr normalize(FieldPtr f, const VectorXd& Y0);

struct HatReduction {
  /// fhat(xi, Yhat) = Yhat + (f(xi, Y0 + xi Yhat) - f(0, Y0)) / xi.
  FieldPtr f_hat;
  /// The forced value Yhat(0) = Y1.
  VectorXd yhat0;
  /// 0 = Yhat' + fhat / xi in solver form, started at yhat0.
  SingularIVP problem;
};

/// Hat reduction. Point values of the difference quotient use 16-node
/// Gauss-Legendre quadrature of the directional derivative; series values of
/// expression-backed maps are exact.
HatReduction reduce_hat(FieldPtr f, const VectorXd& Y0, double t_end = 1.0);

/// Solver form of 0 = Y' + f(xi, Y)/xi: M_{-1}(y) = -f(0, y),
/// M(t, y) = -(f(t, y) - f(0, y)) / t, direct right-hand side -f(t, y)/t.
SingularIVP singular_problem(FieldPtr f, const VectorXd& y0, double t_end);

struct WeakNonlinearity {
  bool pass = true;
  std::string witness;  // first offending monomial, e.g. "y1^2"
  double coefficient = 0.0;
};

/// Every coefficient of xi^0 Y^alpha with |alpha| >= 2 in the expansion of
/// f at (0, 0) must vanish. Needs an expression-backed map.
WeakNonlinearity check_weakly_nonlinear(const Field& f, int order);

}  // namespace rsode
