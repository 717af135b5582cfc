#pragma once

// Nonlinear singular initial value problems
//   y' = M_{-1}(y) / t + M(t, y),   y(0) = y0,
// solved by a Taylor bootstrap at t = 0 and Dormand-Prince continuation.

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rsode/dopri.hpp"
#include "rsode/errors.hpp"
#include "rsode/field.hpp"

namespace rsode {

inline constexpr double kAdmissibilityEps = 1e-10;
inline constexpr double kInvertibilityEps = 1e-8;
inline constexpr double kHandoffFloor = 1e-8;

struct SingularIVP {
  FieldPtr singular;  // M_{-1}; evaluated at t = 0, its t argument is ignored
  FieldPtr regular;   // M
  VectorXd y0;
  double t_end = 1.0;
  /// Optional full right-hand side for t > 0. When set, the integrator and
  /// residual checks use it instead of M_{-1}(y)/t + M(t, y).
  FieldPtr direct_rhs;

  int dim() const { return static_cast<int>(y0.size()); }
  VectorXd rhs(double t, const VectorXd& y) const;
};

struct AdmissibilityReport {
  double residual_norm = 0.0;
  MatrixXd jacobian;
  /// Every h in 1..checked_up_to with sigma_min(hI - J) below threshold.
  std::vector<int> offending_h;
  int checked_up_to = 0;
  /// No h beyond checked_up_to can be offending (true when ||J|| < checked_up_to).
  bool tail_certified = false;
  bool pass = false;
};

class AdmissibilityError : public ValidationError {
 public:
  explicit AdmissibilityError(AdmissibilityReport report);
  const AdmissibilityReport& report() const noexcept { return report_; }

 private:
  AdmissibilityReport report_;
};

AdmissibilityReport check_admissibility(const SingularIVP& p, int order);

/// Taylor coefficients y_0..y_K of the smooth solution. Black-box maps are
/// limited to order kBlackBoxMaxOrder.
std::vector<VectorXd> bootstrap_series(const SingularIVP& p, int order);

struct Handoff {
  double t0 = 0.0;
  VectorXd y;
};

/// Largest t0 <= min(t_max, t_end/2) with ||y_K|| t0^K < tol, falling back to
/// y_{K-1} when y_K vanishes. Throws NumericalError below kHandoffFloor.
Handoff choose_handoff(const std::vector<VectorXd>& coeffs, double tol, double t_max, double t_end);

struct Trajectory {
  std::vector<double> t;
  std::vector<VectorXd> y;
  /// ODE residual at the midpoint of the interval ending at t[i].
  std::vector<double> residual;

  std::vector<VectorXd> series;  // bootstrap coefficients, empty for plain segments
  double t0 = 0.0;
  VectorXd y_t0;
  std::vector<DenseStep<double>> steps;

  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
  /// Max residual over samples in (t0, T].
  double max_residual = 0.0;
  /// Max residual over the series samples in (0, t0].
  double series_residual = 0.0;
  std::vector<std::string> warnings;

  double t_end() const { return t.empty() ? t0 : t.back(); }
  /// Series for t <= t0, dense output after.
  VectorXd state(double time) const;
  VectorXd derivative(double time) const;
};

/// Adaptive integration on [t0, T] with dense output.
Trajectory integrate(const SingularIVP& p, double t0, const VectorXd& y_t0, double tol,
                     double h_max = std::numeric_limits<double>::infinity());

struct SolveOptions {
  int order = 10;
  double tol = 1e-10;
  double t_max = 0.25;
  std::optional<double> forced_t0;
  double h_max = std::numeric_limits<double>::infinity();
};

/// Admissibility, bootstrap, handoff and continuation. Throws
/// AdmissibilityError with the report when the problem is rejected.
Trajectory solve(const SingularIVP& p, const SolveOptions& opts = {});

/// Euclidean residual ||y' - rhs(t, y)|| of a trajectory at time t.
double ode_residual(const SingularIVP& p, const Trajectory& traj, double t);

}  // namespace rsode
