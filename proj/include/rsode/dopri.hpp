#pragma once

// Dormand-Prince 5(4) with PI step control and the standard quartic dense
// output. Real time parameter, real or complex state.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rsode/errors.hpp"

namespace rsode {

struct DopriOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  double h_init = 0.0;  // 0 selects the initial step automatically
  double h_max = std::numeric_limits<double>::infinity();
  long max_steps = 2'000'000;
  bool keep_dense = true;
};

template <class Scalar>
struct DenseStep {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  double t0 = 0.0;
  double h = 0.0;
  Vec r1, r2, r3, r4, r5;

  double t1() const { return t0 + h; }

  Vec value(double t) const {
    const double a = (t - t0) / h, b = 1.0 - a;
    return r1 + a * (r2 + b * (r3 + a * (r4 + b * r5)));
  }

  Vec derivative(double t) const {
    const double a = (t - t0) / h, b = 1.0 - a;
    const Vec x = r3 + a * (r4 + b * r5);
    return (r2 + (b - a) * x + (a * b) * (r4 + (b - a) * r5)) / h;
  }
};

template <class Scalar>
struct DopriResult {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  double t = 0.0;
  Vec y;
  std::vector<DenseStep<Scalar>> steps;
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
  /// Sum over accepted steps of the max-norm of the embedded error estimate.
  double error_sum = 0.0;
};

namespace detail {

template <class Vec>
double error_norm(const Vec& e, const Vec& y0, const Vec& y1, double atol, double rtol) {
  double s = 0.0;
  const auto n = e.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double q = std::abs(e[i]) / sc;
    s += q * q;
  }
  return n > 0 ? std::sqrt(s / static_cast<double>(n)) : 0.0;
}

template <class Vec, class F>
double initial_step(F& f, double t0, const Vec& y0, const Vec& f0, double t1, const DopriOptions& o,
                    long& evals) {
  const Vec zero = Vec::Zero(y0.size());
  const double d0 = error_norm(y0, y0, zero, o.atol, o.rtol);
  const double d1 = error_norm(f0, y0, zero, o.atol, o.rtol);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min({h0, o.h_max, t1 - t0});
  const Vec y1 = y0 + h0 * f0;
  const Vec f1 = f(t0 + h0, y1);
  ++evals;
  const double d2 = error_norm<Vec>(f1 - f0, y0, zero, o.atol, o.rtol) / h0;
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h0, h1, o.h_max, t1 - t0});
}

}  // namespace detail

/// Integrates y' = f(t, y) from t0 to t1 > t0. f(t, y) returns the slope.
/// Throws NumericalError (carrying the last time reached) on step underflow.
template <class Scalar, class F>
DopriResult<Scalar> dopri5(F&& f, double t0, Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y0, double t1,
                           const DopriOptions& opt = {}) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                   a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                   d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                   d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
  constexpr double safety = 0.9, alpha = 0.7 / 5.0, beta = 0.4 / 5.0;

  if (!(t1 > t0)) throw std::invalid_argument("integration interval must be increasing");

  DopriResult<Scalar> res;
  double t = t0;
  Vec y = std::move(y0);
  Vec k1 = f(t, y);
  res.evaluations = 1;
  double h = opt.h_init > 0.0 ? std::min(opt.h_init, t1 - t0)
                              : detail::initial_step<Vec>(f, t, y, k1, t1, opt, res.evaluations);
  double err_old = 1e-4;
  bool last_rejected = false;

  while (t < t1) {
    if (res.accepted + res.rejected >= opt.max_steps)
      throw NumericalError("step limit exceeded", t);
    const double h_min = 1e-14 * std::max(1.0, std::abs(t));
    if (h < h_min) throw NumericalError("step size underflow", t);
    bool last = false;
    if (t + h >= t1 - 1e-14 * std::max(1.0, std::abs(t1))) {
      h = t1 - t;
      last = true;
    }

    const Vec k2 = f(t + c2 * h, y + h * (a21 * k1));
    const Vec k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Vec k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vec ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const Vec k7 = f(t + h, ynew);
    res.evaluations += 6;
    const Vec e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = detail::error_norm(e, y, ynew, opt.atol, opt.rtol);
    if (!std::isfinite(err) || !ynew.allFinite()) {
      ++res.rejected;
      h *= 0.2;
      last_rejected = true;
      continue;
    }

    if (err <= 1.0) {
      err = std::max(err, 1e-10);
      if (opt.keep_dense) {
        DenseStep<Scalar> ds;
        ds.t0 = t;
        ds.h = h;
        ds.r1 = y;
        ds.r2 = ynew - y;
        ds.r3 = h * k1 - ds.r2;
        ds.r4 = ds.r2 - h * k7 - ds.r3;
        ds.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        res.steps.push_back(std::move(ds));
      }
      res.error_sum += e.cwiseAbs().maxCoeff();
      ++res.accepted;
      t = last ? t1 : t + h;
      y = ynew;
      k1 = k7;
      double fac = safety * std::pow(err, -alpha) * std::pow(err_old, beta);
      fac = std::clamp(fac, 0.2, 10.0);
      if (last_rejected) fac = std::min(fac, 1.0);
      err_old = err;
      last_rejected = false;
      h = std::min(h * fac, opt.h_max);
    } else {
      ++res.rejected;
      const double fac = std::max(0.2, safety * std::pow(err, -alpha));
      h *= fac;
      last_rejected = true;
    }
  }
  res.t = t;
  res.y = std::move(y);
  return res;
}

}  // namespace rsode
