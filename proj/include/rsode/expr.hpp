#pragma once

// One-variable (optionally multi-variable) analytic expressions: parsing,
// rendering, exact symbolic differentiation and evaluation over reals,
// complex numbers and truncated power series.
//
// Grammar (whitespace insensitive):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' exponent)?        exponent := '-'? power   (constant)
//   primary := number | 'pi' | variable | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | tan | exp | log | sqrt | sinh | cosh | tanh

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rsode/multi_series.hpp"
#include "rsode/series.hpp"

namespace rsode {

enum class ExprKind {
  Constant,
  Variable,
  Negate,
  Add,
  Subtract,
  Multiply,
  Divide,
  Power,
  Sin,
  Cos,
  Tan,
  Exp,
  Log,
  Sqrt,
  Sinh,
  Cosh,
  Tanh,
};

/// Immutable expression tree. Copies share structure; safe to evaluate
/// concurrently.
class Expr {
 public:
  struct Node;

  /// The constant 0.
  Expr();
  static Expr constant(double value);
  static Expr variable(int index = 0);
  static Expr function(ExprKind kind, Expr argument);
  static Expr power(Expr base, double exponent);
  /// Node of the given kind with no folding. `b` is used by binary kinds,
  /// `exponent` by Power.
  static Expr unfolded(ExprKind kind, const Expr& a, const Expr& b = Expr(), double exponent = 0.0);

  ExprKind kind() const;
  /// Value of a Constant node.
  double value() const;
  /// Index of a Variable node.
  int variable_index() const;
  /// Exponent of a Power node.
  double exponent() const;
  Expr lhs() const;
  Expr rhs() const;

  bool is_constant(double v) const;
  /// True when no variable occurs in the tree.
  bool is_closed() const;
  /// Largest variable index used, -1 for closed expressions.
  int max_variable() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

  const Node* node() const noexcept { return node_.get(); }

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

inline const std::vector<std::string>& default_variables() {
  static const std::vector<std::string> names{"t"};
  return names;
}

/// Parses text; variable names map to indices in order. Throws ParseError.
Expr parse(std::string_view text, std::span<const std::string> variables = default_variables());

/// Renders in the same grammar, fully parenthesized, literals with 17
/// significant digits.
std::string render(const Expr& e, std::span<const std::string> variables = default_variables());

/// Exact derivative with respect to variable `index`. The result is not
/// simplified beyond trivial constant folding.
Expr differentiate(const Expr& e, int index = 0);

/// Generic evaluation; vars[i] is the value of variable i. Instantiated for
/// double, std::complex<double>, RealSeries, ComplexSeries and MultiSeries.
/// Throws DomainError.
template <class T>
T evaluate(const Expr& e, std::span<const T> vars);

double eval_real(const Expr& e, double t);
std::complex<double> eval_complex(const Expr& e, std::complex<double> z);

/// Taylor coefficients c_0..c_K about t0 by Taylor-mode propagation.
RealSeries taylor(const Expr& e, double t0, int order);
ComplexSeries taylor_complex(const Expr& e, double t0, int order);

}  // namespace rsode
