#include "rsode/reduction.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "rsode/errors.hpp"

namespace rsode {

namespace {

// 16-point Gauss-Legendre on [0, 1].
struct GaussLegendre16 {
  std::array<double, 16> x{};
  std::array<double, 16> w{};
  GaussLegendre16() {
    constexpr int n = 16;
    for (int i = 0; i < n; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x[static_cast<std::size_t>(i)] = 0.5 * (1.0 - z);
      w[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

const GaussLegendre16& gauss() {
  static const GaussLegendre16 g;
  return g;
}

// d/dtau f(t + tau, y + tau * dy) at tau = 0.
VectorXd directional(const Field& f, double t, const VectorXd& y, const VectorXd& dy) {
  const int k = f.dim();
  if (f.has_taylor()) {
    std::vector<RealSeries> ys;
    for (int i = 0; i < k; ++i) ys.push_back(RealSeries({y(i), dy(i)}));
    const auto F = f.eval_series(RealSeries({t, 1.0}), ys);
    VectorXd d(k);
    for (int i = 0; i < k; ++i) d(i) = F[static_cast<std::size_t>(i)][1];
    return d;
  }
  const double h = 1e-6 * (1.0 + std::abs(t) + y.cwiseAbs().maxCoeff());
  return (f.eval(t + h, y + h * dy) - f.eval(t - h, y - h * dy)) / (2.0 * h);
}

// G / t for series with G(0) = 0 when t(0) = 0. Both are padded by one
// order first, which is exact when t is a polynomial of degree <= order.
std::vector<RealSeries> pad(std::span<const RealSeries> y) {
  std::vector<RealSeries> out;
  for (const auto& s : y) out.push_back(s.truncated(s.order() + 1));
  return out;
}

bool is_zero_series(const RealSeries& t) {
  for (int k = 0; k <= t.order(); ++k)
    if (t[k] != 0.0) return false;
  return true;
}

RealSeries divide_by(const RealSeries& G, const RealSeries& t, int order) {
  if (t[0] != 0.0) return (G / t).truncated(order);
  return (shift_down(G, 1) / shift_down(t, 1)).truncated(order);
}

class ShiftedField final : public Field {
 public:
  ShiftedField(FieldPtr f, VectorXd shift) : f_(std::move(f)), shift_(std::move(shift)) {}
  int dim() const override { return f_->dim(); }
  VectorXd eval(double t, const VectorXd& y) const override { return f_->eval(t, y + shift_); }
  bool has_taylor() const override { return f_->has_taylor(); }
  std::vector<RealSeries> eval_series(const RealSeries& t, std::span<const RealSeries> y) const override {
    std::vector<RealSeries> ys(y.begin(), y.end());
    for (std::size_t i = 0; i < ys.size(); ++i) ys[i][0] += shift_(static_cast<Eigen::Index>(i));
    return f_->eval_series(t, ys);
  }
  std::vector<MultiSeries> eval_multi(std::span<const MultiSeries> vars) const override {
    std::vector<MultiSeries> v(vars.begin(), vars.end());
    for (std::size_t i = 1; i < v.size(); ++i) v[i].coeffs()[0] += shift_(static_cast<Eigen::Index>(i - 1));
    return f_->eval_multi(v);
  }
  MatrixXd jacobian_y(double t, const VectorXd& y) const override { return f_->jacobian_y(t, y + shift_); }
  VectorXd derivative_t(double t, const VectorXd& y) const override { return f_->derivative_t(t, y + shift_); }

 private:
  FieldPtr f_;
  VectorXd shift_;
};

class HatField final : public Field {
 public:
  HatField(FieldPtr f, VectorXd Y0)
      : f_(std::move(f)),
        Y0_(std::move(Y0)),
        f00_(f_->eval(0.0, Y0_)),
        a0_(f_->derivative_t(0.0, Y0_)),
        A0_(f_->jacobian_y(0.0, Y0_)) {}
  int dim() const override { return f_->dim(); }

  VectorXd eval(double xi, const VectorXd& yhat) const override {
    // (f(xi, Y0 + xi yhat) - f(0, Y0)) / xi = int_0^1 D f(s xi, Y0 + s xi yhat)[1, yhat] ds
    const auto& g = gauss();
    VectorXd q = VectorXd::Zero(dim());
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      const double s = g.x[i] * xi;
      q += g.w[i] * directional(*f_, s, Y0_ + s * yhat, yhat);
    }
    return yhat + q;
  }

  bool has_taylor() const override { return f_->has_taylor(); }

  std::vector<RealSeries> eval_series(const RealSeries& t, std::span<const RealSeries> y) const override {
    if (is_zero_series(t)) {
      // fhat(0, Yhat) = a0 + (I + A0) Yhat
      std::vector<RealSeries> out;
      for (int i = 0; i < dim(); ++i) {
        RealSeries s = y[static_cast<std::size_t>(i)] + a0_(i);
        for (int j = 0; j < dim(); ++j) s = s + y[static_cast<std::size_t>(j)] * A0_(i, j);
        out.push_back(std::move(s));
      }
      return out;
    }
    if (!f_->has_taylor()) return Field::eval_series(t, y);
    const int order = t.order();
    const RealSeries tp = t.truncated(order + 1);
    const auto yp = pad(y);
    std::vector<RealSeries> Y;
    for (std::size_t i = 0; i < yp.size(); ++i) Y.push_back(tp * yp[i] + Y0_(static_cast<Eigen::Index>(i)));
    const auto F = f_->eval_series(tp, Y);
    std::vector<RealSeries> out;
    for (std::size_t i = 0; i < F.size(); ++i) {
      const RealSeries G = F[i] - f00_(static_cast<Eigen::Index>(i));
      out.push_back(y[i] + divide_by(G, tp, order));
    }
    return out;
  }

 private:
  FieldPtr f_;
  VectorXd Y0_;
  VectorXd f00_;
  VectorXd a0_;
  MatrixXd A0_;
};

class NegatedAtZero final : public Field {
 public:
  explicit NegatedAtZero(FieldPtr f) : f_(std::move(f)) {}
  int dim() const override { return f_->dim(); }
  VectorXd eval(double, const VectorXd& y) const override { return -f_->eval(0.0, y); }
  bool has_taylor() const override { return f_->has_taylor(); }
  std::vector<RealSeries> eval_series(const RealSeries& t, std::span<const RealSeries> y) const override {
    auto F = f_->eval_series(RealSeries::constant(0.0, t.order(), t.point()), y);
    for (auto& s : F) s *= -1.0;
    return F;
  }
  MatrixXd jacobian_y(double, const VectorXd& y) const override { return -f_->jacobian_y(0.0, y); }
  VectorXd derivative_t(double, const VectorXd& y) const override { return VectorXd::Zero(y.size()); }

 private:
  FieldPtr f_;
};

class QuotientField final : public Field {
 public:
  explicit QuotientField(FieldPtr f) : f_(std::move(f)) {}
  int dim() const override { return f_->dim(); }
  VectorXd eval(double t, const VectorXd& y) const override {
    if (t == 0.0) return -f_->derivative_t(0.0, y);
    return -(f_->eval(t, y) - f_->eval(0.0, y)) / t;
  }
  bool has_taylor() const override { return f_->has_taylor(); }
  std::vector<RealSeries> eval_series(const RealSeries& t, std::span<const RealSeries> y) const override {
    if (!f_->has_taylor() || is_zero_series(t)) return Field::eval_series(t, y);
    const int order = t.order();
    const RealSeries tp = t.truncated(order + 1);
    const auto yp = pad(y);
    const auto F = f_->eval_series(tp, yp);
    const auto F0 = f_->eval_series(RealSeries::constant(0.0, order + 1, t.point()), yp);
    std::vector<RealSeries> out;
    for (std::size_t i = 0; i < F.size(); ++i) out.push_back(-divide_by(F[i] - F0[i], tp, order));
    return out;
  }

 private:
  FieldPtr f_;
};

class DirectField final : public Field {
 public:
  explicit DirectField(FieldPtr f) : f_(std::move(f)) {}
  int dim() const override { return f_->dim(); }
  VectorXd eval(double t, const VectorXd& y) const override { return -f_->eval(t, y) / t; }

 private:
  FieldPtr f_;
};

}  // namespace

LimitCheck continuation_limit_check(const Field& f, const VectorXd& Y0) {
  LimitCheck c;
  c.residual_norm = f.eval(0.0, Y0).norm();
  c.pass = c.residual_norm < kAdmissibilityEps;
  return c;
}

InitialDerivative initial_derivative(const Field& f, const VectorXd& Y0) {
  if (!continuation_limit_check(f, Y0).pass) throw ValidationError("f(0, Y0) does not vanish");
  const int k = f.dim();
  InitialDerivative r;
  r.a0 = f.derivative_t(0.0, Y0);
  r.A0 = f.jacobian_y(0.0, Y0);
  const MatrixXd B = MatrixXd::Identity(k, k) + r.A0;
  const Eigen::VectorXcd ev = B.eigenvalues();
  r.spectrum.assign(ev.data(), ev.data() + ev.size());
  Eigen::FullPivLU<MatrixXd> lu(B);
  if (!lu.isInvertible()) throw NumericalError("I + A0 is singular");
  r.Y1 = -lu.solve(r.a0);
  return r;
}

FieldPtr normalize(FieldPtr f, const VectorXd& Y0) {
  if (Y0.size() != f->dim()) throw std::invalid_argument("shift has the wrong dimension");
  return std::make_shared<ShiftedField>(std::move(f), Y0);
}

SingularIVP singular_problem(FieldPtr f, const VectorXd& y0, double t_end) {
  SingularIVP p;
  p.singular = std::make_shared<NegatedAtZero>(f);
  p.regular = std::make_shared<QuotientField>(f);
  p.direct_rhs = std::make_shared<DirectField>(f);
  p.y0 = y0;
  p.t_end = t_end;
  return p;
}

HatReduction reduce_hat(FieldPtr f, const VectorXd& Y0, double t_end) {
  const auto d = initial_derivative(*f, Y0);
  HatReduction r;
  r.f_hat = std::make_shared<HatField>(f, Y0);
  r.yhat0 = d.Y1;
  r.problem = singular_problem(r.f_hat, r.yhat0, t_end);
  return r;
}

WeakNonlinearity check_weakly_nonlinear(const Field& f, int order) {
  if (order < 2) throw std::invalid_argument("weak nonlinearity needs order >= 2");
  const int k = f.dim();
  const int nv = k + 1;
  std::vector<MultiSeries> vars;
  for (int i = 0; i < nv; ++i) vars.push_back(MultiSeries::variable(i, 0.0, nv, order));
  const auto F = f.eval_multi(vars);
  std::vector<std::string> names;
  for (int i = 1; i <= k; ++i) names.push_back("y" + std::to_string(i));
  WeakNonlinearity out;
  const auto& monos = F.front().monomials();
  for (std::size_t m = 0; m < monos.size(); ++m) {
    const auto& e = monos[m];
    if (e[0] != 0) continue;
    int deg = 0;
    for (int i = 1; i < nv; ++i) deg += e[static_cast<std::size_t>(i)];
    if (deg < 2) continue;
    for (const auto& comp : F) {
      const double c = comp.coeffs()[m];
      if (std::abs(c) >= kAdmissibilityEps) {
        out.pass = false;
        out.witness = monomial_text(std::span<const int>(e).subspan(1), names);
        out.coefficient = c;
        return out;
      }
    }
  }
  return out;
}

}  // namespace rsode
