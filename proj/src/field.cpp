#include "rsode/field.hpp"

#include <cmath>
#include <stdexcept>

#include "rsode/errors.hpp"

namespace rsode {

namespace {

constexpr int kStencil = 4;          // points on each side
constexpr double kStencilWidth = 0.1;

}  // namespace

std::vector<RealSeries> Field::eval_series(const RealSeries& t, std::span<const RealSeries> y) const {
  const int k = dim();
  if (static_cast<int>(y.size()) != k) throw std::invalid_argument("state dimension mismatch");
  const int order = t.order();
  const int npts = 2 * kStencil + 1;
  Eigen::MatrixXd V(npts, npts);
  Eigen::MatrixXd G(npts, k);
  for (int j = 0; j < npts; ++j) {
    const double tau = kStencilWidth * (j - kStencil) / kStencil;
    double p = 1.0;
    for (int c = 0; c < npts; ++c, p *= tau) V(j, c) = p;
    VectorXd yv(k);
    for (int i = 0; i < k; ++i) yv(i) = eval_truncated(y[static_cast<std::size_t>(i)], tau).value;
    G.row(j) = eval(eval_truncated(t, tau).value, yv).transpose();
  }
  const Eigen::MatrixXd C = V.partialPivLu().solve(G);
  std::vector<RealSeries> out;
  for (int i = 0; i < k; ++i) {
    RealSeries s = RealSeries::zero(order, t.point());
    for (int c = 0; c <= std::min(order, npts - 1); ++c) s[c] = C(c, i);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<MultiSeries> Field::eval_multi(std::span<const MultiSeries>) const {
  throw ValidationError("multivariate expansion needs an expression-backed map");
}

MatrixXd Field::jacobian_y(double t, const VectorXd& y) const {
  const int k = dim();
  MatrixXd J(k, k);
  if (has_taylor()) {
    const RealSeries ts = RealSeries::constant(t, 1);
    for (int j = 0; j < k; ++j) {
      std::vector<RealSeries> ys;
      for (int i = 0; i < k; ++i) ys.push_back(RealSeries({y(i), i == j ? 1.0 : 0.0}));
      const auto F = eval_series(ts, ys);
      for (int i = 0; i < k; ++i) J(i, j) = F[static_cast<std::size_t>(i)][1];
    }
    return J;
  }
  for (int j = 0; j < k; ++j) {
    const double h = 1e-6 * (1.0 + std::abs(y(j)));
    VectorXd yp = y, ym = y;
    yp(j) += h;
    ym(j) -= h;
    J.col(j) = (eval(t, yp) - eval(t, ym)) / (2.0 * h);
  }
  return J;
}

VectorXd Field::derivative_t(double t, const VectorXd& y) const {
  if (has_taylor()) {
    std::vector<RealSeries> ys;
    for (int i = 0; i < dim(); ++i) ys.push_back(RealSeries::constant(y(i), 1));
    const auto F = eval_series(RealSeries({t, 1.0}), ys);
    VectorXd d(dim());
    for (int i = 0; i < dim(); ++i) d(i) = F[static_cast<std::size_t>(i)][1];
    return d;
  }
  const double h = 1e-6 * (1.0 + std::abs(t));
  return (eval(t + h, y) - eval(t - h, y)) / (2.0 * h);
}

std::vector<std::string> field_variables(int k) {
  std::vector<std::string> names{"t"};
  for (int i = 1; i <= k; ++i) names.push_back("y" + std::to_string(i));
  return names;
}

ExprField::ExprField(std::vector<Expr> components) : components_(std::move(components)) {
  const int k = dim();
  if (k < 1) throw ValidationError("field has no components");
  for (const auto& e : components_)
    if (e.max_variable() > k) throw ValidationError("field component uses an unknown variable");
}

std::shared_ptr<ExprField> ExprField::from_strings(const std::vector<std::string>& components) {
  const auto names = field_variables(static_cast<int>(components.size()));
  std::vector<Expr> exprs;
  for (const auto& c : components) exprs.push_back(parse(c, names));
  return std::make_shared<ExprField>(std::move(exprs));
}

VectorXd ExprField::eval(double t, const VectorXd& y) const {
  const int k = dim();
  if (y.size() != k) throw std::invalid_argument("state dimension mismatch");
  std::vector<double> vars(static_cast<std::size_t>(k + 1));
  vars[0] = t;
  for (int i = 0; i < k; ++i) vars[static_cast<std::size_t>(i + 1)] = y(i);
  VectorXd out(k);
  for (int i = 0; i < k; ++i) out(i) = evaluate<double>(components_[static_cast<std::size_t>(i)], vars);
  return out;
}

std::vector<RealSeries> ExprField::eval_series(const RealSeries& t, std::span<const RealSeries> y) const {
  const int k = dim();
  if (static_cast<int>(y.size()) != k) throw std::invalid_argument("state dimension mismatch");
  std::vector<RealSeries> vars;
  vars.reserve(static_cast<std::size_t>(k + 1));
  vars.push_back(t);
  vars.insert(vars.end(), y.begin(), y.end());
  std::vector<RealSeries> out;
  for (const auto& e : components_) out.push_back(evaluate<RealSeries>(e, vars));
  return out;
}

std::vector<MultiSeries> ExprField::eval_multi(std::span<const MultiSeries> vars) const {
  if (static_cast<int>(vars.size()) != dim() + 1) throw std::invalid_argument("variable count mismatch");
  std::vector<MultiSeries> out;
  for (const auto& e : components_) out.push_back(evaluate<MultiSeries>(e, vars));
  return out;
}

MatrixXd ExprField::jacobian_y(double t, const VectorXd& y) const {
  const int k = dim();
  std::vector<MultiSeries> vars;
  vars.push_back(MultiSeries::constant(t, k, 1));
  for (int i = 0; i < k; ++i) vars.push_back(MultiSeries::variable(i, y(i), k, 1));
  const auto F = eval_multi(vars);
  MatrixXd J(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) J(i, j) = F[static_cast<std::size_t>(i)].coeffs()[static_cast<std::size_t>(1 + j)];
  return J;
}

VectorXd ExprField::derivative_t(double t, const VectorXd& y) const {
  const int k = dim();
  const RealSeries ts = RealSeries::identity(t, 1);
  std::vector<RealSeries> ys;
  for (int i = 0; i < k; ++i) ys.push_back(RealSeries::constant(y(i), 1, t));
  const auto F = eval_series(ts, ys);
  VectorXd d(k);
  for (int i = 0; i < k; ++i) d(i) = F[static_cast<std::size_t>(i)][1];
  return d;
}

}  // namespace rsode
