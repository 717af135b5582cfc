#pragma once

// Vector fields F(t, y): R x R^k -> R^k with optional Taylor-mode support.

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rsode/expr.hpp"
#include "rsode/multi_series.hpp"
#include "rsode/series.hpp"

namespace rsode {

using Eigen::MatrixXd;
using Eigen::VectorXd;

class Field {
 public:
  virtual ~Field() = default;

  virtual int dim() const = 0;
  virtual VectorXd eval(double t, const VectorXd& y) const = 0;

  /// True when eval_series is exact Taylor-mode propagation.
  virtual bool has_taylor() const { return false; }

  /// Series of F(t(tau), y(tau)) for series arguments sharing one expansion
  /// point. The default interpolates eval on a small symmetric stencil and
  /// is only accurate for low orders.
  virtual std::vector<RealSeries> eval_series(const RealSeries& t, std::span<const RealSeries> y) const;

  /// Joint expansion in (t, y_1..y_k): vars[0] is t, vars[1 + i] is y_i.
  /// Only expression-backed fields support this.
  virtual std::vector<MultiSeries> eval_multi(std::span<const MultiSeries> vars) const;

  /// dF/dy at (t, y). The default uses central differences.
  virtual MatrixXd jacobian_y(double t, const VectorXd& y) const;

  /// dF/dt at (t, y). The default uses a central difference.
  virtual VectorXd derivative_t(double t, const VectorXd& y) const;
};

using FieldPtr = std::shared_ptr<const Field>;

/// Variable names {"t", "y1", ..., "yk"}.
std::vector<std::string> field_variables(int k);

/// Components are expressions in t, y1..yk.
class ExprField final : public Field {
 public:
  explicit ExprField(std::vector<Expr> components);
  /// Parses each component with field_variables(components.size()).
  static std::shared_ptr<ExprField> from_strings(const std::vector<std::string>& components);

  int dim() const override { return static_cast<int>(components_.size()); }
  VectorXd eval(double t, const VectorXd& y) const override;
  bool has_taylor() const override { return true; }
  std::vector<RealSeries> eval_series(const RealSeries& t, std::span<const RealSeries> y) const override;
  std::vector<MultiSeries> eval_multi(std::span<const MultiSeries> vars) const override;
  MatrixXd jacobian_y(double t, const VectorXd& y) const override;
  VectorXd derivative_t(double t, const VectorXd& y) const override;

  const std::vector<Expr>& components() const noexcept { return components_; }

 private:
  std::vector<Expr> components_;
};

/// Black-box evaluator.
class FunctionField final : public Field {
 public:
  using Fn = std::function<VectorXd(double, const VectorXd&)>;
  FunctionField(int dim, Fn fn) : dim_(dim), fn_(std::move(fn)) {}

  int dim() const override { return dim_; }
  VectorXd eval(double t, const VectorXd& y) const override { return fn_(t, y); }

 private:
  int dim_;
  Fn fn_;
};

/// Largest order for which interpolated series of black-box fields are used.
inline constexpr int kBlackBoxMaxOrder = 4;

}  // namespace rsode
