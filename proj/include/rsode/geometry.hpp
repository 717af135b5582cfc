#pragma once

// Metric endomorphism families P_t on p + m dimensions and the reduction of
// the equivariant harmonic and biharmonic map equations along a normal
// geodesic to singular first-order systems.
//
// With S = diag(t on the collapsing block, 1 elsewhere) the regular factor
// R = S^{-1} P S^{-1} is analytic and invertible at t = 0. Near t = 0 the
// traces are evaluated from bivariate Taylor tables in (t, a), rho = t a.

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "rsode/expr.hpp"
#include "rsode/singular_ivp.hpp"

namespace rsode {

struct ConformalFactor {
  Expr alpha;  // domain metric scaled by exp(2 alpha(t))
  int n = 0;   // orbit dimension
};

struct MetricOptions {
  double t_validate = 1.0;
  double t_switch = 1e-2;
  int series_order = 32;
  std::optional<ConformalFactor> conformal;
};

/// Block form. B is p x p, A is m x m, C is p x m; empty expression
/// matrices mean zero.
///   P|pp = t^2 I + t^4 B(t),  P|mm = A0 + t A1 + t^2 A(t),  P|pm = t^2 C0 + t^3 C(t)
struct BlockSpec {
  Eigen::MatrixXd A0, A1, C0;
  std::vector<std::vector<Expr>> B, A, C;
};

/// Bivariate coefficient table c[k][e] of sum c[k][e] t^k a^e.
using Table = std::vector<std::vector<double>>;

class MetricFamily {
 public:
  static MetricFamily diagonal(int dim_p, int dim_m, std::vector<Expr> entries, MetricOptions opts = {});
  static MetricFamily block(int dim_p, int dim_m, const BlockSpec& spec, MetricOptions opts = {});
  /// Full symmetric matrix of expressions.
  static MetricFamily general(int dim_p, int dim_m, std::vector<std::vector<Expr>> P, MetricOptions opts = {});

  int dim_p() const noexcept { return p_; }
  int dim_m() const noexcept { return m_; }
  int dim() const noexcept { return p_ + m_; }
  bool is_diagonal() const noexcept { return diagonal_; }
  double t_switch() const noexcept { return opts_.t_switch; }
  const MetricOptions& options() const noexcept { return opts_; }
  const std::vector<std::vector<Expr>>& entries() const noexcept { return P_; }

  Eigen::MatrixXd P(double t) const;
  Eigen::MatrixXd P_dot(double t) const;
  Eigen::MatrixXd P_ddot(double t) const;

  /// 1/2 Tr(P_t^{-1} dP_t/dt), series path below t_switch.
  double drift(double t) const;
  double drift_direct(double t) const;
  double drift_series(double t) const;

  /// 1/2 Tr(P_t^{-1} P'(rho)).
  double potential(double t, double rho) const;
  double potential_direct(double t, double rho) const;
  double potential_series(double t, double rho) const;

  /// 1/2 Tr(P_t^{-1} P''(rho)).
  double potential2(double t, double rho) const;
  double potential2_direct(double t, double rho) const;
  double potential2_series(double t, double rho) const;

  /// n alpha'(t), zero without a conformal factor.
  double conformal_rate(double t) const;
  const std::vector<double>& conformal_rate_coeffs() const noexcept { return c_; }

  // Regular parts of the reduction, r = t a:
  //   E(t)     = t drift(t)                               (E(0) = p)
  //   L1(t, a) = (t potential(t, t a) - E(t) a) / t
  //   L2(t, a) = (t^2 potential2(t, t a) - E(t)) / t
  double E(double t) const;
  double lambda1(double t, double a) const;
  double lambda2(double t, double a) const;
  const std::vector<double>& E_coeffs() const noexcept { return E_; }
  const Table& lambda1_coeffs() const noexcept { return L1_; }
  const Table& lambda2_coeffs() const noexcept { return L2_; }

 private:
  MetricFamily() = default;
  void finish(bool diagonal);
  void build_series();
  void validate() const;

  int p_ = 0;
  int m_ = 0;
  bool diagonal_ = true;
  MetricOptions opts_;
  std::vector<std::vector<Expr>> P_, Pd_, Pdd_;
  Expr c_expr_;
  bool has_conformal_ = false;

  std::vector<double> E_;  // Taylor coefficients of E
  Table C1_, C2_;          // t potential(t, t a) and t^2 potential2(t, t a)
  Table L1_, L2_;
  std::vector<double> c_;  // Taylor coefficients of n alpha'
};

/// Sum c[k][e] t^k a^e.
double eval_table(const Table& c, double t, double a);
/// The same with series arguments; terms beyond the series order are dropped.
RealSeries eval_table(const Table& c, const RealSeries& t, const RealSeries& a);

// ---------------------------------------------------------------------------
// Independent second-order checkers.

/// r'' + drift r' - potential(t, r) + n alpha' r'.
double tension_residual(const MetricFamily& P, double t, double r, double rdot, double rddot);

/// (r'' + drift r' - potential(t, r) - F,  F'' + drift F' - potential2(t, r) F).
std::pair<double, double> biharmonic_residual(const MetricFamily& P, double t, double r, double rdot,
                                              double rddot, double F, double Fdot, double Fddot);

// ---------------------------------------------------------------------------
// Reduced problems. Harmonic state (a, u) with r = t a, u = a'. Biharmonic
// state (a, u, b, beta) with F = t b, beta = b'.

SingularIVP assemble_harmonic(const MetricFamily& P, double v, double t_end);
SingularIVP assemble_biharmonic(const MetricFamily& P, double v, double w, double t_end);

struct HarmonicSolution {
  Trajectory trajectory;
  double v = 0.0;
  std::vector<double> t, r, r_dot, r_ddot, residual;
  /// Max tension residual over samples in (t0, T].
  double max_residual = 0.0;
};

struct BiharmonicSolution {
  Trajectory trajectory;
  double v = 0.0, w = 0.0;
  std::vector<double> t, r, r_dot, r_ddot, F, F_dot, F_ddot, res_def, res_eq;
  double max_residual = 0.0;
  double r_ddot0 = 0.0;   // 2 a_1
  double r_dddot0 = 0.0;  // 6 a_2
};

struct RadialPoint {
  double r = 0.0, r_dot = 0.0, r_ddot = 0.0;
  double F = 0.0, F_dot = 0.0, F_ddot = 0.0;
};

/// Undoes the Ansatz at time t using the trajectory state and derivative.
RadialPoint radial_point(const Trajectory& traj, double t);

HarmonicSolution recover_r(const MetricFamily& P, const Trajectory& traj, double v);
BiharmonicSolution recover_biharmonic(const MetricFamily& P, const Trajectory& traj, double v, double w);

HarmonicSolution solve_harmonic(const MetricFamily& P, double v, double t_end, const SolveOptions& opts = {});
BiharmonicSolution solve_biharmonic(const MetricFamily& P, double v, double w, double t_end,
                                    const SolveOptions& opts = {});

}  // namespace rsode
