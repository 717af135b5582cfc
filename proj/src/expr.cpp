#include "rsode/expr.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "rsode/errors.hpp"

namespace rsode {

struct Expr::Node {
  ExprKind kind = ExprKind::Constant;
  double value = 0.0;  // Constant value, or Power exponent
  int index = -1;      // Variable index
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
  int max_var = -1;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(ExprKind kind, NodePtr a = nullptr, NodePtr b = nullptr, double value = 0.0,
             int index = -1) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = kind;
  n->value = value;
  n->index = index;
  n->a = std::move(a);
  n->b = std::move(b);
  n->max_var = index;
  if (n->a) n->max_var = std::max(n->max_var, n->a->max_var);
  if (n->b) n->max_var = std::max(n->max_var, n->b->max_var);
  return n;
}

bool is_const(const NodePtr& n) { return n->kind == ExprKind::Constant; }
bool is_const(const NodePtr& n, double v) { return is_const(n) && n->value == v; }

bool is_integer(double e) { return std::floor(e) == e && std::abs(e) < 1e9; }

bool is_function(ExprKind k) {
  switch (k) {
    case ExprKind::Sin:
    case ExprKind::Cos:
    case ExprKind::Tan:
    case ExprKind::Exp:
    case ExprKind::Log:
    case ExprKind::Sqrt:
    case ExprKind::Sinh:
    case ExprKind::Cosh:
    case ExprKind::Tanh:
      return true;
    default:
      return false;
  }
}

const char* function_name(ExprKind k) {
  switch (k) {
    case ExprKind::Sin: return "sin";
    case ExprKind::Cos: return "cos";
    case ExprKind::Tan: return "tan";
    case ExprKind::Exp: return "exp";
    case ExprKind::Log: return "log";
    case ExprKind::Sqrt: return "sqrt";
    case ExprKind::Sinh: return "sinh";
    case ExprKind::Cosh: return "cosh";
    case ExprKind::Tanh: return "tanh";
    default: return "?";
  }
}

// ---------------------------------------------------------------------------
// Per-type arithmetic with domain checks.

template <class T>
struct Ops;

template <>
struct Ops<double> {
  static double constant(double c, const double*) { return c; }
  static double div(double a, double b) {
    if (b == 0.0) throw DomainError("division by zero");
    return a / b;
  }
  static double pow(double a, double e) {
    if (a == 0.0 && e < 0.0) throw DomainError("division by zero");
    if (!is_integer(e) && a < 0.0) throw DomainError("non-integer power of a negative real");
    return std::pow(a, e);
  }
  static double log(double a) {
    if (!(a > 0.0)) throw DomainError("log of a nonpositive real");
    return std::log(a);
  }
  static double sqrt(double a) {
    if (a < 0.0) throw DomainError("sqrt of a negative real");
    return std::sqrt(a);
  }
  static double sin(double a) { return std::sin(a); }
  static double cos(double a) { return std::cos(a); }
  static double tan(double a) { return std::tan(a); }
  static double exp(double a) { return std::exp(a); }
  static double sinh(double a) { return std::sinh(a); }
  static double cosh(double a) { return std::cosh(a); }
  static double tanh(double a) { return std::tanh(a); }
};

template <>
struct Ops<std::complex<double>> {
  using C = std::complex<double>;
  static C constant(double c, const C*) { return {c, 0.0}; }
  static C div(C a, C b) {
    if (b == C{}) throw DomainError("division by zero");
    return a / b;
  }
  static C pow(C a, double e) {
    if (is_integer(e)) {
      if (a == C{} && e < 0.0) throw DomainError("division by zero");
      long long n = static_cast<long long>(std::abs(e));
      C result{1.0, 0.0}, base = a;
      while (n > 0) {
        if (n & 1) result *= base;
        n >>= 1;
        if (n > 0) base *= base;
      }
      return e < 0.0 ? C{1.0, 0.0} / result : result;
    }
    if (a == C{}) {
      if (e > 0.0) return C{};
      throw DomainError("division by zero");
    }
    return std::exp(e * std::log(a));
  }
  static C log(C a) {
    if (a == C{}) throw DomainError("log at zero");
    return std::log(a);
  }
  static C sqrt(C a) { return std::sqrt(a); }
  static C sin(C a) { return std::sin(a); }
  static C cos(C a) { return std::cos(a); }
  static C tan(C a) { return std::tan(a); }
  static C exp(C a) { return std::exp(a); }
  static C sinh(C a) { return std::sinh(a); }
  static C cosh(C a) { return std::cosh(a); }
  static C tanh(C a) { return std::tanh(a); }
};

template <class U>
struct Ops<Series<U>> {
  using S = Series<U>;
  static S constant(double c, const S* like) {
    if (!like) throw std::invalid_argument("series evaluation needs at least one variable");
    return S::constant(U(c), like->order(), like->point());
  }
  static S div(const S& a, const S& b) { return a / b; }
  static S pow(const S& a, double e) { return rsode::pow(a, e); }
  static S log(const S& a) { return rsode::log(a); }
  static S sqrt(const S& a) { return rsode::sqrt(a); }
  static S sin(const S& a) { return rsode::sin(a); }
  static S cos(const S& a) { return rsode::cos(a); }
  static S tan(const S& a) { return rsode::tan(a); }
  static S exp(const S& a) { return rsode::exp(a); }
  static S sinh(const S& a) { return rsode::sinh(a); }
  static S cosh(const S& a) { return rsode::cosh(a); }
  static S tanh(const S& a) { return rsode::tanh(a); }
};

template <>
struct Ops<MultiSeries> {
  using M = MultiSeries;
  static M constant(double c, const M* like) {
    if (!like) throw std::invalid_argument("series evaluation needs at least one variable");
    return M::constant(c, like->nvars(), like->order());
  }
  static M div(const M& a, const M& b) { return a / b; }
  static M pow(const M& a, double e) {
    if (is_integer(e) && e >= 0) {
      M result = M::constant(1.0, a.nvars(), a.order());
      auto n = static_cast<long long>(e);
      M base = a;
      while (n > 0) {
        if (n & 1) result = result * base;
        n >>= 1;
        if (n > 0) base = base * base;
      }
      return result;
    }
    return rsode::pow(a, e);
  }
  static M log(const M& a) { return rsode::log(a); }
  static M sqrt(const M& a) { return rsode::sqrt(a); }
  static M sin(const M& a) { return rsode::sin(a); }
  static M cos(const M& a) { return rsode::cos(a); }
  static M tan(const M& a) { return rsode::tan(a); }
  static M exp(const M& a) { return rsode::exp(a); }
  static M sinh(const M& a) { return rsode::sinh(a); }
  static M cosh(const M& a) { return rsode::cosh(a); }
  static M tanh(const M& a) { return rsode::tanh(a); }
};

template <class T>
T eval_node(const Expr::Node& n, std::span<const T> vars) {
  using O = Ops<T>;
  const T* like = vars.empty() ? nullptr : &vars[0];
  switch (n.kind) {
    case ExprKind::Constant:
      return O::constant(n.value, like);
    case ExprKind::Variable:
      if (n.index < 0 || static_cast<std::size_t>(n.index) >= vars.size())
        throw std::invalid_argument("expression uses an unbound variable");
      return vars[static_cast<std::size_t>(n.index)];
    case ExprKind::Negate:
      return -eval_node(*n.a, vars);
    case ExprKind::Add:
      return eval_node(*n.a, vars) + eval_node(*n.b, vars);
    case ExprKind::Subtract:
      return eval_node(*n.a, vars) - eval_node(*n.b, vars);
    case ExprKind::Multiply:
      return eval_node(*n.a, vars) * eval_node(*n.b, vars);
    case ExprKind::Divide:
      return O::div(eval_node(*n.a, vars), eval_node(*n.b, vars));
    case ExprKind::Power:
      return O::pow(eval_node(*n.a, vars), n.value);
    case ExprKind::Sin: return O::sin(eval_node(*n.a, vars));
    case ExprKind::Cos: return O::cos(eval_node(*n.a, vars));
    case ExprKind::Tan: return O::tan(eval_node(*n.a, vars));
    case ExprKind::Exp: return O::exp(eval_node(*n.a, vars));
    case ExprKind::Log: return O::log(eval_node(*n.a, vars));
    case ExprKind::Sqrt: return O::sqrt(eval_node(*n.a, vars));
    case ExprKind::Sinh: return O::sinh(eval_node(*n.a, vars));
    case ExprKind::Cosh: return O::cosh(eval_node(*n.a, vars));
    case ExprKind::Tanh: return O::tanh(eval_node(*n.a, vars));
  }
  throw std::logic_error("unknown expression node");
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void render_node(const Expr::Node& n, std::span<const std::string> names, std::string& out) {
  auto binary = [&](const char* op) {
    out += '(';
    render_node(*n.a, names, out);
    out += op;
    render_node(*n.b, names, out);
    out += ')';
  };
  switch (n.kind) {
    case ExprKind::Constant:
      if (std::signbit(n.value))
        out += "(-" + format_number(-n.value) + ")";
      else
        out += format_number(n.value);
      return;
    case ExprKind::Variable:
      if (static_cast<std::size_t>(n.index) < names.size())
        out += names[static_cast<std::size_t>(n.index)];
      else
        throw std::invalid_argument("no name for variable " + std::to_string(n.index));
      return;
    case ExprKind::Negate:
      out += "(-";
      render_node(*n.a, names, out);
      out += ')';
      return;
    case ExprKind::Add: binary("+"); return;
    case ExprKind::Subtract: binary("-"); return;
    case ExprKind::Multiply: binary("*"); return;
    case ExprKind::Divide: binary("/"); return;
    case ExprKind::Power:
      out += '(';
      render_node(*n.a, names, out);
      out += ")^(";
      out += std::signbit(n.value) ? "-" + format_number(-n.value) : format_number(n.value);
      out += ')';
      return;
    default:
      out += function_name(n.kind);
      out += '(';
      render_node(*n.a, names, out);
      out += ')';
      return;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction with light constant folding.

Expr::Expr() : node_(make(ExprKind::Constant)) {}

Expr Expr::constant(double value) { return Expr(make(ExprKind::Constant, nullptr, nullptr, value)); }

Expr Expr::variable(int index) {
  if (index < 0) throw std::invalid_argument("negative variable index");
  return Expr(make(ExprKind::Variable, nullptr, nullptr, 0.0, index));
}

Expr Expr::function(ExprKind kind, Expr argument) {
  if (!is_function(kind)) throw std::invalid_argument("not a function kind");
  return Expr(make(kind, argument.node_));
}

Expr Expr::power(Expr base, double exponent) {
  if (exponent == 1.0) return base;
  if (exponent == 0.0) return constant(1.0);
  return Expr(make(ExprKind::Power, base.node_, nullptr, exponent));
}

Expr Expr::unfolded(ExprKind kind, const Expr& a, const Expr& b, double exponent) {
  switch (kind) {
    case ExprKind::Constant:
    case ExprKind::Variable:
      throw std::invalid_argument("leaf kinds have no operands");
    case ExprKind::Negate:
      return Expr(make(kind, a.node_));
    case ExprKind::Add:
    case ExprKind::Subtract:
    case ExprKind::Multiply:
    case ExprKind::Divide:
      return Expr(make(kind, a.node_, b.node_));
    case ExprKind::Power:
      return Expr(make(kind, a.node_, nullptr, exponent));
    default:
      return Expr(make(kind, a.node_));
  }
}

ExprKind Expr::kind() const { return node_->kind; }
double Expr::value() const {
  if (node_->kind != ExprKind::Constant) throw std::logic_error("not a constant node");
  return node_->value;
}
int Expr::variable_index() const {
  if (node_->kind != ExprKind::Variable) throw std::logic_error("not a variable node");
  return node_->index;
}
double Expr::exponent() const {
  if (node_->kind != ExprKind::Power) throw std::logic_error("not a power node");
  return node_->value;
}
Expr Expr::lhs() const {
  if (!node_->a) throw std::logic_error("node has no operand");
  return Expr(node_->a);
}
Expr Expr::rhs() const {
  if (!node_->b) throw std::logic_error("node has no second operand");
  return Expr(node_->b);
}
bool Expr::is_constant(double v) const { return is_const(node_, v); }
bool Expr::is_closed() const { return node_->max_var < 0; }
int Expr::max_variable() const { return node_->max_var; }

Expr operator+(const Expr& a, const Expr& b) {
  if (is_const(a.node_, 0.0)) return b;
  if (is_const(b.node_, 0.0)) return a;
  if (is_const(a.node_) && is_const(b.node_)) return Expr::constant(a.node_->value + b.node_->value);
  return Expr(make(ExprKind::Add, a.node_, b.node_));
}

Expr operator-(const Expr& a, const Expr& b) {
  if (is_const(b.node_, 0.0)) return a;
  if (is_const(a.node_, 0.0)) return -b;
  if (is_const(a.node_) && is_const(b.node_)) return Expr::constant(a.node_->value - b.node_->value);
  return Expr(make(ExprKind::Subtract, a.node_, b.node_));
}

Expr operator*(const Expr& a, const Expr& b) {
  if (is_const(a.node_, 0.0) || is_const(b.node_, 0.0)) return Expr::constant(0.0);
  if (is_const(a.node_, 1.0)) return b;
  if (is_const(b.node_, 1.0)) return a;
  if (is_const(a.node_) && is_const(b.node_)) return Expr::constant(a.node_->value * b.node_->value);
  return Expr(make(ExprKind::Multiply, a.node_, b.node_));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (is_const(b.node_, 1.0)) return a;
  if (is_const(a.node_, 0.0) && !is_const(b.node_, 0.0)) return Expr::constant(0.0);
  if (is_const(a.node_) && is_const(b.node_) && b.node_->value != 0.0)
    return Expr::constant(a.node_->value / b.node_->value);
  return Expr(make(ExprKind::Divide, a.node_, b.node_));
}

Expr operator-(const Expr& a) {
  if (is_const(a.node_)) return Expr::constant(-a.node_->value);
  if (a.node_->kind == ExprKind::Negate) return Expr(a.node_->a);
  return Expr(make(ExprKind::Negate, a.node_));
}

// ---------------------------------------------------------------------------

Expr differentiate(const Expr& e, int index) {
  const Expr::Node& n = *e.node();
  auto fn = [](ExprKind k, const Expr& x) { return Expr::function(k, x); };
  switch (n.kind) {
    case ExprKind::Constant:
      return Expr::constant(0.0);
    case ExprKind::Variable:
      return Expr::constant(n.index == index ? 1.0 : 0.0);
    default:
      break;
  }
  if (n.max_var < index) return Expr::constant(0.0);
  const Expr a = e.lhs();
  const Expr da = differentiate(a, index);
  switch (n.kind) {
    case ExprKind::Negate:
      return -da;
    case ExprKind::Add:
      return da + differentiate(e.rhs(), index);
    case ExprKind::Subtract:
      return da - differentiate(e.rhs(), index);
    case ExprKind::Multiply: {
      const Expr b = e.rhs();
      return da * b + a * differentiate(b, index);
    }
    case ExprKind::Divide: {
      const Expr b = e.rhs();
      const Expr db = differentiate(b, index);
      if (db.is_constant(0.0)) return da / b;
      return (da * b - a * db) / Expr::power(b, 2.0);
    }
    case ExprKind::Power:
      return Expr::constant(n.value) * Expr::power(a, n.value - 1.0) * da;
    case ExprKind::Sin:
      return fn(ExprKind::Cos, a) * da;
    case ExprKind::Cos:
      return -(fn(ExprKind::Sin, a) * da);
    case ExprKind::Tan:
      return da / Expr::power(fn(ExprKind::Cos, a), 2.0);
    case ExprKind::Exp:
      return e * da;
    case ExprKind::Log:
      return da / a;
    case ExprKind::Sqrt:
      return da / (Expr::constant(2.0) * e);
    case ExprKind::Sinh:
      return fn(ExprKind::Cosh, a) * da;
    case ExprKind::Cosh:
      return fn(ExprKind::Sinh, a) * da;
    case ExprKind::Tanh:
      return da / Expr::power(fn(ExprKind::Cosh, a), 2.0);
    default:
      break;
  }
  throw std::logic_error("unknown expression node");
}

template <class T>
T evaluate(const Expr& e, std::span<const T> vars) {
  return eval_node<T>(*e.node(), vars);
}

template double evaluate<double>(const Expr&, std::span<const double>);
template std::complex<double> evaluate<std::complex<double>>(const Expr&,
                                                             std::span<const std::complex<double>>);
template RealSeries evaluate<RealSeries>(const Expr&, std::span<const RealSeries>);
template ComplexSeries evaluate<ComplexSeries>(const Expr&, std::span<const ComplexSeries>);
template MultiSeries evaluate<MultiSeries>(const Expr&, std::span<const MultiSeries>);

double eval_real(const Expr& e, double t) {
  const double v[1] = {t};
  return evaluate<double>(e, v);
}

std::complex<double> eval_complex(const Expr& e, std::complex<double> z) {
  const std::complex<double> v[1] = {z};
  return evaluate<std::complex<double>>(e, v);
}

RealSeries taylor(const Expr& e, double t0, int order) {
  if (order < 0) throw std::invalid_argument("negative series order");
  const RealSeries v[1] = {RealSeries::identity(t0, order)};
  return evaluate<RealSeries>(e, v);
}

ComplexSeries taylor_complex(const Expr& e, double t0, int order) {
  if (order < 0) throw std::invalid_argument("negative series order");
  const ComplexSeries v[1] = {ComplexSeries::identity(t0, order)};
  return evaluate<ComplexSeries>(e, v);
}

std::string render(const Expr& e, std::span<const std::string> variables) {
  std::string out;
  render_node(*e.node(), variables, out);
  return out;
}

}  // namespace rsode
