#include <cmath>

#include "rsode/errors.hpp"
#include "rsode/geometry.hpp"

namespace rsode {

namespace {

using Family = std::shared_ptr<const MetricFamily>;

RealSeries poly(const std::vector<double>& c, std::size_t from, const RealSeries& t) {
  RealSeries acc = RealSeries::zero(t.order(), t.point());
  for (std::size_t k = c.size(); k-- > from;) acc = acc * t + c[k];
  return acc;
}

double poly(const std::vector<double>& c, std::size_t from, double t) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > from;) acc = acc * t + c[k];
  return acc;
}

Table drop_first_row(const Table& c) { return Table(c.begin() + 1, c.end()); }

Table first_row(const Table& c) { return Table(c.begin(), c.begin() + 1); }

// Shared pieces of the reduced equations. With r = t a, u = a':
//   t u' = -(p+2) u + H,  H = L1(t, a) - (E - p) u - c (a + t u) [+ t b]
//   t beta' = -(p+2) beta + L2(t, a) b - (E - p) beta
struct Reduced {
  Family fam;
  bool biharmonic = false;
  double p = 0.0;
  Table L1_0, L2_0;  // t = 0 rows
  Table L1_s, L2_s;  // (L(t, a) - L(0, a)) / t

  explicit Reduced(Family f, bool bih) : fam(std::move(f)), biharmonic(bih), p(fam->dim_p()) {
    L1_0 = first_row(fam->lambda1_coeffs());
    L2_0 = first_row(fam->lambda2_coeffs());
    L1_s = drop_first_row(fam->lambda1_coeffs());
    L2_s = drop_first_row(fam->lambda2_coeffs());
  }
  double c0() const { return fam->conformal_rate_coeffs()[0]; }
  int dim() const { return biharmonic ? 4 : 2; }
};

class SingularPart final : public Field {
 public:
  explicit SingularPart(std::shared_ptr<const Reduced> r) : r_(std::move(r)) {}
  int dim() const override { return r_->dim(); }
  bool has_taylor() const override { return true; }

  VectorXd eval(double, const VectorXd& y) const override {
    const Reduced& R = *r_;
    VectorXd out = VectorXd::Zero(dim());
    out(1) = -(R.p + 2.0) * y(1) + eval_table(R.L1_0, 0.0, y(0)) - R.c0() * y(0);
    if (R.biharmonic) out(3) = -(R.p + 2.0) * y(3) + eval_table(R.L2_0, 0.0, y(0)) * y(2);
    return out;
  }

  std::vector<RealSeries> eval_series(const RealSeries& t, std::span<const RealSeries> y) const override {
    const Reduced& R = *r_;
    const RealSeries zero = RealSeries::zero(t.order(), t.point());
    std::vector<RealSeries> out(static_cast<std::size_t>(dim()), zero);
    out[1] = y[1] * (-(R.p + 2.0)) + eval_table(R.L1_0, zero, y[0]) - y[0] * R.c0();
    if (R.biharmonic) out[3] = y[3] * (-(R.p + 2.0)) + eval_table(R.L2_0, zero, y[0]) * y[2];
    return out;
  }

 private:
  std::shared_ptr<const Reduced> r_;
};

class RegularPart final : public Field {
 public:
  explicit RegularPart(std::shared_ptr<const Reduced> r) : r_(std::move(r)) {}
  int dim() const override { return r_->dim(); }
  bool has_taylor() const override { return true; }

  VectorXd eval(double t, const VectorXd& y) const override {
    const Reduced& R = *r_;
    const MetricFamily& F = *R.fam;
    VectorXd out(dim());
    out(0) = y(1);
    if (t < F.t_switch()) {
      // (H(t) - H(0)) / t from the shifted tables
      const auto& c = F.conformal_rate_coeffs();
      out(1) = eval_table(R.L1_s, t, y(0)) - poly(F.E_coeffs(), 1, t) * y(1) - poly(c, 1, t) * y(0) -
               F.conformal_rate(t) * y(1);
      if (R.biharmonic) {
        out(1) += y(2);
        out(2) = y(3);
        out(3) = eval_table(R.L2_s, t, y(0)) * y(2) - poly(F.E_coeffs(), 1, t) * y(3);
      }
      return out;
    }
    const double Em = F.E(t) - R.p;
    const double h1 = F.lambda1(t, y(0)) - Em * y(1) - F.conformal_rate(t) * (y(0) + t * y(1));
    const double h10 = eval_table(R.L1_0, 0.0, y(0)) - R.c0() * y(0);
    out(1) = (h1 - h10) / t;
    if (R.biharmonic) {
      out(1) += y(2);
      out(2) = y(3);
      const double g = F.lambda2(t, y(0)) * y(2) - Em * y(3);
      const double g0 = eval_table(R.L2_0, 0.0, y(0)) * y(2);
      out(3) = (g - g0) / t;
    }
    return out;
  }

  std::vector<RealSeries> eval_series(const RealSeries& t, std::span<const RealSeries> y) const override {
    const Reduced& R = *r_;
    const MetricFamily& F = *R.fam;
    const auto& c = F.conformal_rate_coeffs();
    const RealSeries Es = poly(F.E_coeffs(), 1, t);
    std::vector<RealSeries> out(static_cast<std::size_t>(dim()), RealSeries::zero(t.order(), t.point()));
    out[0] = y[1];
    out[1] = eval_table(R.L1_s, t, y[0]) - Es * y[1] - poly(c, 1, t) * y[0] - poly(c, 0, t) * y[1];
    if (R.biharmonic) {
      out[1] = out[1] + y[2];
      out[2] = y[3];
      out[3] = eval_table(R.L2_s, t, y[0]) * y[2] - Es * y[3];
    }
    return out;
  }

 private:
  std::shared_ptr<const Reduced> r_;
};

class DirectPart final : public Field {
 public:
  explicit DirectPart(std::shared_ptr<const Reduced> r) : r_(std::move(r)) {}
  int dim() const override { return r_->dim(); }

  VectorXd eval(double t, const VectorXd& y) const override {
    const Reduced& R = *r_;
    const MetricFamily& F = *R.fam;
    const double Em = F.E(t) - R.p;
    VectorXd out(dim());
    out(0) = y(1);
    const double H = F.lambda1(t, y(0)) - Em * y(1) - F.conformal_rate(t) * (y(0) + t * y(1));
    out(1) = (-(R.p + 2.0) * y(1) + H) / t;
    if (R.biharmonic) {
      out(1) += y(2);
      out(2) = y(3);
      out(3) = (-(R.p + 2.0) * y(3) + F.lambda2(t, y(0)) * y(2) - Em * y(3)) / t;
    }
    return out;
  }

 private:
  std::shared_ptr<const Reduced> r_;
};

SingularIVP make_problem(std::shared_ptr<const Reduced> red, VectorXd y0, double t_end) {
  if (!(t_end > 0.0)) throw ValidationError("end time must be positive");
  SingularIVP p;
  p.singular = std::make_shared<SingularPart>(red);
  p.regular = std::make_shared<RegularPart>(red);
  p.direct_rhs = std::make_shared<DirectPart>(red);
  p.y0 = std::move(y0);
  p.t_end = t_end;
  return p;
}

}  // namespace

double tension_residual(const MetricFamily& P, double t, double r, double rdot, double rddot) {
  return rddot + P.drift(t) * rdot - P.potential(t, r) + P.conformal_rate(t) * rdot;
}

std::pair<double, double> biharmonic_residual(const MetricFamily& P, double t, double r, double rdot,
                                              double rddot, double F, double Fdot, double Fddot) {
  const double D = P.drift(t);
  const double def = rddot + D * rdot - P.potential(t, r) - F;
  const double eq = Fddot + D * Fdot - P.potential2(t, r) * F;
  return {def, eq};
}

SingularIVP assemble_harmonic(const MetricFamily& P, double v, double t_end) {
  auto red = std::make_shared<const Reduced>(std::make_shared<const MetricFamily>(P), false);
  VectorXd y0(2);
  y0(0) = v;
  y0(1) = (eval_table(red->L1_0, 0.0, v) - red->c0() * v) / (red->p + 2.0);
  return make_problem(red, y0, t_end);
}

SingularIVP assemble_biharmonic(const MetricFamily& P, double v, double w, double t_end) {
  if (!P.is_diagonal()) throw ValidationError("the biharmonic reduction needs a diagonal metric");
  if (P.options().conformal) throw ValidationError("the biharmonic reduction does not support a conformal factor");
  auto red = std::make_shared<const Reduced>(std::make_shared<const MetricFamily>(P), true);
  VectorXd y0(4);
  y0(0) = v;
  y0(1) = eval_table(red->L1_0, 0.0, v) / (red->p + 2.0);
  y0(2) = w;
  y0(3) = eval_table(red->L2_0, 0.0, v) * w / (red->p + 2.0);
  return make_problem(red, y0, t_end);
}

RadialPoint radial_point(const Trajectory& traj, double t) {
  const VectorXd y = traj.state(t);
  const VectorXd dy = traj.derivative(t);
  RadialPoint p;
  p.r = t * y(0);
  p.r_dot = y(0) + t * y(1);
  p.r_ddot = 2.0 * y(1) + t * dy(1);
  if (y.size() >= 4) {
    p.F = t * y(2);
    p.F_dot = y(2) + t * y(3);
    p.F_ddot = 2.0 * y(3) + t * dy(3);
  }
  return p;
}

HarmonicSolution recover_r(const MetricFamily& P, const Trajectory& traj, double v) {
  HarmonicSolution s;
  s.v = v;
  for (double t : traj.t) {
    const RadialPoint q = radial_point(traj, t);
    const double res = tension_residual(P, t, q.r, q.r_dot, q.r_ddot);
    s.t.push_back(t);
    s.r.push_back(q.r);
    s.r_dot.push_back(q.r_dot);
    s.r_ddot.push_back(q.r_ddot);
    s.residual.push_back(res);
    if (t > traj.t0) s.max_residual = std::max(s.max_residual, std::abs(res));
  }
  s.trajectory = traj;
  return s;
}

BiharmonicSolution recover_biharmonic(const MetricFamily& P, const Trajectory& traj, double v, double w) {
  BiharmonicSolution s;
  s.v = v;
  s.w = w;
  for (double t : traj.t) {
    const RadialPoint q = radial_point(traj, t);
    const auto [def, eq] = biharmonic_residual(P, t, q.r, q.r_dot, q.r_ddot, q.F, q.F_dot, q.F_ddot);
    s.t.push_back(t);
    s.r.push_back(q.r);
    s.r_dot.push_back(q.r_dot);
    s.r_ddot.push_back(q.r_ddot);
    s.F.push_back(q.F);
    s.F_dot.push_back(q.F_dot);
    s.F_ddot.push_back(q.F_ddot);
    s.res_def.push_back(def);
    s.res_eq.push_back(eq);
    if (t > traj.t0) s.max_residual = std::max({s.max_residual, std::abs(def), std::abs(eq)});
  }
  if (traj.series.size() >= 3) {
    s.r_ddot0 = 2.0 * traj.series[1](0);
    s.r_dddot0 = 6.0 * traj.series[2](0);
  }
  s.trajectory = traj;
  return s;
}

HarmonicSolution solve_harmonic(const MetricFamily& P, double v, double t_end, const SolveOptions& opts) {
  const SingularIVP prob = assemble_harmonic(P, v, t_end);
  return recover_r(P, solve(prob, opts), v);
}

BiharmonicSolution solve_biharmonic(const MetricFamily& P, double v, double w, double t_end,
                                    const SolveOptions& opts) {
  const SingularIVP prob = assemble_biharmonic(P, v, w, t_end);
  return recover_biharmonic(P, solve(prob, opts), v, w);
}

}  // namespace rsode
