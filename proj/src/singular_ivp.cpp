#include "rsode/singular_ivp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rsode {

namespace {

std::string describe(const AdmissibilityReport& r) {
  std::ostringstream os;
  os << "problem is not admissible: residual " << r.residual_norm;
  if (!r.offending_h.empty()) {
    os << ", hI - J singular for h =";
    for (int h : r.offending_h) os << ' ' << h;
  }
  return os.str();
}

VectorXd series_value(const std::vector<VectorXd>& c, double t) {
  VectorXd acc = c.back();
  for (int h = static_cast<int>(c.size()) - 2; h >= 0; --h) acc = acc * t + c[static_cast<std::size_t>(h)];
  return acc;
}

VectorXd series_slope(const std::vector<VectorXd>& c, double t) {
  const int K = static_cast<int>(c.size()) - 1;
  if (K == 0) return VectorXd::Zero(c[0].size());
  VectorXd acc = c.back() * K;
  for (int h = K - 1; h >= 1; --h) acc = acc * t + c[static_cast<std::size_t>(h)] * h;
  return acc;
}

}  // namespace

VectorXd SingularIVP::rhs(double t, const VectorXd& y) const {
  if (direct_rhs) return direct_rhs->eval(t, y);
  return singular->eval(0.0, y) / t + regular->eval(t, y);
}

AdmissibilityError::AdmissibilityError(AdmissibilityReport report)
    : ValidationError(describe(report)), report_(std::move(report)) {}

AdmissibilityReport check_admissibility(const SingularIVP& p, int order) {
  if (!p.singular || !p.regular) throw std::invalid_argument("problem maps are not set");
  const int k = p.dim();
  if (p.singular->dim() != k || p.regular->dim() != k)
    throw ValidationError("map dimensions disagree with the initial value");
  AdmissibilityReport r;
  r.residual_norm = p.singular->eval(0.0, p.y0).norm();
  r.jacobian = p.singular->jacobian_y(0.0, p.y0);
  const double jnorm = r.jacobian.operatorNorm();
  r.checked_up_to = std::max(order, static_cast<int>(std::ceil(jnorm)) + 1);
  const MatrixXd I = MatrixXd::Identity(k, k);
  for (int h = 1; h <= r.checked_up_to; ++h) {
    Eigen::JacobiSVD<MatrixXd> svd(h * I - r.jacobian);
    const double smin = svd.singularValues()(k - 1);
    if (smin < kInvertibilityEps * (h + jnorm)) r.offending_h.push_back(h);
  }
  r.tail_certified = jnorm < r.checked_up_to;
  r.pass = r.residual_norm < kAdmissibilityEps && r.offending_h.empty();
  return r;
}

std::vector<VectorXd> bootstrap_series(const SingularIVP& p, int order) {
  if (order < 1 || order > 30) throw std::invalid_argument("series order must be in 1..30");
  const bool exact = p.singular->has_taylor() && p.regular->has_taylor();
  if (!exact && order > kBlackBoxMaxOrder)
    throw ValidationError("black-box maps support series order at most " +
                          std::to_string(kBlackBoxMaxOrder));
  const int k = p.dim();
  const MatrixXd J = p.singular->jacobian_y(0.0, p.y0);
  const MatrixXd I = MatrixXd::Identity(k, k);
  std::vector<VectorXd> c{p.y0};
  for (int h = 1; h <= order; ++h) {
    std::vector<RealSeries> y;
    for (int i = 0; i < k; ++i) {
      RealSeries s = RealSeries::zero(h);
      for (int j = 0; j < h; ++j) s[j] = c[static_cast<std::size_t>(j)](i);
      y.push_back(std::move(s));
    }
    const RealSeries t0 = RealSeries::constant(0.0, h);
    const auto sing = p.singular->eval_series(t0, y);
    const auto reg = p.regular->eval_series(RealSeries::identity(0.0, h), y);
    VectorXd b(k);
    for (int i = 0; i < k; ++i) b(i) = sing[static_cast<std::size_t>(i)][h] + reg[static_cast<std::size_t>(i)][h - 1];
    Eigen::FullPivLU<MatrixXd> lu(h * I - J);
    if (!lu.isInvertible()) throw NumericalError("singular bootstrap system at order " + std::to_string(h));
    c.push_back(lu.solve(b));
  }
  return c;
}

Handoff choose_handoff(const std::vector<VectorXd>& coeffs, double tol, double t_max, double t_end) {
  if (coeffs.size() < 2) throw std::invalid_argument("need at least one series coefficient");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const int K = static_cast<int>(coeffs.size()) - 1;
  double t0 = std::min(t_max, 0.5 * t_end);
  double last = coeffs[static_cast<std::size_t>(K)].norm();
  int power = K;
  if (last == 0.0 && K >= 2) {
    last = coeffs[static_cast<std::size_t>(K - 1)].norm();
    power = K - 1;
  }
  if (last > 0.0) t0 = std::min(t0, std::pow(tol / last, 1.0 / power));
  if (!(t0 >= kHandoffFloor))
    throw NumericalError("no handoff time above 1e-8 meets the tolerance; raise the series order", 0.0);
  return {t0, series_value(coeffs, t0)};
}

VectorXd Trajectory::state(double time) const {
  if (!series.empty() && time <= t0) return series_value(series, time);
  if (steps.empty()) {
    if (time == t0) return y_t0;
    throw std::out_of_range("time outside the trajectory");
  }
  if (time < steps.front().t0 || time > steps.back().t1() * (1 + 1e-14))
    throw std::out_of_range("time outside the trajectory");
  auto it = std::upper_bound(steps.begin(), steps.end(), time,
                             [](double x, const DenseStep<double>& s) { return x < s.t0; });
  if (it != steps.begin()) --it;
  return it->value(time);
}

VectorXd Trajectory::derivative(double time) const {
  if (!series.empty() && time <= t0) return series_slope(series, time);
  if (steps.empty() || time < steps.front().t0 || time > steps.back().t1() * (1 + 1e-14))
    throw std::out_of_range("time outside the trajectory");
  auto it = std::upper_bound(steps.begin(), steps.end(), time,
                             [](double x, const DenseStep<double>& s) { return x < s.t0; });
  if (it != steps.begin()) --it;
  return it->derivative(time);
}

double ode_residual(const SingularIVP& p, const Trajectory& traj, double t) {
  return (traj.derivative(t) - p.rhs(t, traj.state(t))).norm();
}

Trajectory integrate(const SingularIVP& p, double t0, const VectorXd& y_t0, double tol, double h_max) {
  if (!(t0 > 0.0)) throw std::invalid_argument("integration must start at t0 > 0");
  Trajectory traj;
  traj.t0 = t0;
  traj.y_t0 = y_t0;
  if (t0 >= p.t_end) return traj;
  DopriOptions o;
  o.rtol = tol;
  o.atol = tol;
  o.h_max = h_max;
  auto f = [&p](double t, const VectorXd& y) -> VectorXd { return p.rhs(t, y); };
  auto res = dopri5<double>(f, t0, y_t0, p.t_end, o);
  traj.steps = std::move(res.steps);
  traj.accepted = res.accepted;
  traj.rejected = res.rejected;
  traj.evaluations = res.evaluations;
  for (const auto& s : traj.steps) {
    const double mid = s.t0 + 0.5 * s.h;
    const double r = (s.derivative(mid) - p.rhs(mid, s.value(mid))).norm();
    traj.t.push_back(s.t1());
    traj.y.push_back(s.value(s.t1()));
    traj.residual.push_back(r);
    traj.max_residual = std::max(traj.max_residual, r);
  }
  if (!traj.y.empty()) traj.y.back() = res.y;
  return traj;
}

Trajectory solve(const SingularIVP& p, const SolveOptions& opts) {
  if (!(p.t_end > 0.0)) throw ValidationError("end time must be positive");
  const auto report = check_admissibility(p, opts.order);
  if (!report.pass) throw AdmissibilityError(report);

  const auto coeffs = bootstrap_series(p, opts.order);
  Handoff ho;
  if (opts.forced_t0) {
    if (!(*opts.forced_t0 > 0.0 && *opts.forced_t0 <= p.t_end))
      throw ValidationError("forced handoff time must lie in (0, T]");
    ho = {*opts.forced_t0, series_value(coeffs, *opts.forced_t0)};
  } else {
    ho = choose_handoff(coeffs, opts.tol, opts.t_max, p.t_end);
  }

  Trajectory seg = integrate(p, ho.t0, ho.y, opts.tol, opts.h_max);
  Trajectory traj;
  traj.series = coeffs;
  traj.t0 = ho.t0;
  traj.y_t0 = ho.y;
  const double growth = std::pow(coeffs.back().norm(), 1.0 / opts.order);
  if (growth * kHandoffFloor > 1.0) traj.warnings.push_back("series coefficients grow fast");

  constexpr int kSeriesSamples = 8;
  double prev = 0.0;
  for (int j = 1; j <= kSeriesSamples; ++j) {
    const double t = ho.t0 * j / kSeriesSamples;
    const double mid = 0.5 * (prev + t);
    const double r = (series_slope(coeffs, mid) - p.rhs(mid, series_value(coeffs, mid))).norm();
    traj.t.push_back(t);
    traj.y.push_back(j == kSeriesSamples ? ho.y : series_value(coeffs, t));
    traj.residual.push_back(r);
    traj.series_residual = std::max(traj.series_residual, r);
    prev = t;
  }
  traj.steps = std::move(seg.steps);
  traj.t.insert(traj.t.end(), seg.t.begin(), seg.t.end());
  traj.y.insert(traj.y.end(), seg.y.begin(), seg.y.end());
  traj.residual.insert(traj.residual.end(), seg.residual.begin(), seg.residual.end());
  traj.max_residual = seg.max_residual;
  traj.accepted = seg.accepted;
  traj.rejected = seg.rejected;
  traj.evaluations = seg.evaluations;
  return traj;
}

}  // namespace rsode
