#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "rsode/errors.hpp"
#include "rsode/expr.hpp"

namespace rsode {

namespace {

std::string describe(const std::string& reason, int line, int column,
                     const std::vector<std::string>& expected) {
  std::string msg = "parse error at line " + std::to_string(line) + ", column " +
                    std::to_string(column) + ": " + reason;
  if (!expected.empty()) {
    msg += " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += expected[i];
    }
    msg += ")";
  }
  return msg;
}

struct FunctionEntry {
  std::string_view name;
  ExprKind kind;
};

constexpr FunctionEntry kFunctions[] = {
    {"sin", ExprKind::Sin},   {"cos", ExprKind::Cos},   {"tan", ExprKind::Tan},
    {"exp", ExprKind::Exp},   {"log", ExprKind::Log},   {"sqrt", ExprKind::Sqrt},
    {"sinh", ExprKind::Sinh}, {"cosh", ExprKind::Cosh}, {"tanh", ExprKind::Tanh},
};

enum class Tok { End, Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Bad };

struct Token {
  Tok kind = Tok::End;
  std::string_view text;
  double number = 0.0;
  int line = 1;
  int column = 1;
};

const std::vector<std::string> kOperand{"number", "identifier", "'('", "'-'"};

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> vars) : src_(text), vars_(vars) {
    advance();
  }

  Expr parse_all() {
    if (cur_.kind == Tok::End) fail("empty input", kOperand);
    Expr e = expr();
    if (cur_.kind != Tok::End) {
      if (cur_.kind == Tok::RParen) fail("unbalanced ')'", {"operator", "end of input"});
      fail("unexpected '" + std::string(cur_.text) + "'", {"operator", "end of input"});
    }
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& reason, std::vector<std::string> expected) {
    throw ParseError(reason, cur_.line, cur_.column, std::move(expected));
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      if (src_[pos_] == '\n') {
        ++line_;
        line_start_ = pos_ + 1;
      }
      ++pos_;
    }
  }

  void advance() {
    skip_space();
    cur_ = Token{};
    cur_.line = line_;
    cur_.column = static_cast<int>(pos_ - line_start_) + 1;
    if (pos_ >= src_.size()) return;
    const std::size_t start = pos_;
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
        ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t p = pos_ + 1;
        if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
        if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
          while (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) ++p;
          pos_ = p;
        }
      }
      cur_.text = src_.substr(start, pos_ - start);
      auto [ptr, ec] = std::from_chars(cur_.text.data(), cur_.text.data() + cur_.text.size(), cur_.number);
      if (ec != std::errc() || ptr != cur_.text.data() + cur_.text.size() || !std::isfinite(cur_.number))
        fail("malformed number '" + std::string(cur_.text) + "'", {"number"});
      cur_.kind = Tok::Number;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      cur_.text = src_.substr(start, pos_ - start);
      cur_.kind = Tok::Ident;
      return;
    }
    ++pos_;
    cur_.text = src_.substr(start, 1);
    switch (c) {
      case '+': cur_.kind = Tok::Plus; break;
      case '-': cur_.kind = Tok::Minus; break;
      case '*': cur_.kind = Tok::Star; break;
      case '/': cur_.kind = Tok::Slash; break;
      case '^': cur_.kind = Tok::Caret; break;
      case '(': cur_.kind = Tok::LParen; break;
      case ')': cur_.kind = Tok::RParen; break;
      default:
        cur_.kind = Tok::Bad;
        fail("unexpected character", {});
    }
  }

  Expr expr() {
    Expr e = term();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      const Tok op = cur_.kind;
      advance();
      Expr rhs = term();
      e = op == Tok::Plus ? combine(ExprKind::Add, e, rhs) : combine(ExprKind::Subtract, e, rhs);
    }
    return e;
  }

  Expr term() {
    Expr e = unary();
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
      const Tok op = cur_.kind;
      advance();
      Expr rhs = unary();
      e = op == Tok::Star ? combine(ExprKind::Multiply, e, rhs) : combine(ExprKind::Divide, e, rhs);
    }
    return e;
  }

  Expr unary() {
    if (cur_.kind == Tok::Minus) {
      advance();
      return negate(unary());
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (cur_.kind != Tok::Caret) return base;
    advance();
    const Token at = cur_;
    bool negative = false;
    if (cur_.kind == Tok::Minus) {
      negative = true;
      advance();
    }
    Expr ex = power();
    if (!ex.is_closed()) {
      throw ParseError("exponent must be a constant", at.line, at.column, {"constant exponent"});
    }
    double value;
    try {
      value = evaluate<double>(ex, std::span<const double>{});
    } catch (const DomainError& err) {
      throw ParseError(std::string("exponent is undefined: ") + err.what(), at.line, at.column,
                       {"constant exponent"});
    }
    if (negative) value = -value;
    if (!std::isfinite(value))
      throw ParseError("exponent is not finite", at.line, at.column, {"constant exponent"});
    return power_node(base, value);
  }

  Expr primary() {
    switch (cur_.kind) {
      case Tok::Number: {
        const double v = cur_.number;
        advance();
        return Expr::constant(v);
      }
      case Tok::LParen: {
        advance();
        if (cur_.kind == Tok::RParen) fail("empty parentheses", kOperand);
        Expr e = expr();
        if (cur_.kind != Tok::RParen) fail("unbalanced '('", {"')'", "operator"});
        advance();
        return e;
      }
      case Tok::Ident: {
        const Token id = cur_;
        for (const auto& f : kFunctions) {
          if (f.name == id.text) {
            advance();
            if (cur_.kind != Tok::LParen) fail("expected '(' after " + std::string(f.name), {"'('"});
            advance();
            if (cur_.kind == Tok::End) fail("unexpected end of input", kOperand);
            Expr arg = expr();
            if (cur_.kind != Tok::RParen) fail("unbalanced '('", {"')'", "operator"});
            advance();
            return Expr::function(f.kind, arg);
          }
        }
        for (std::size_t i = 0; i < vars_.size(); ++i) {
          if (vars_[i] == id.text) {
            advance();
            return Expr::variable(static_cast<int>(i));
          }
        }
        if (id.text == "pi") {
          advance();
          return Expr::constant(std::numbers::pi);
        }
        std::vector<std::string> expected;
        for (const auto& v : vars_) expected.push_back("'" + v + "'");
        expected.emplace_back("function name");
        expected.emplace_back("'pi'");
        fail("unknown identifier '" + std::string(id.text) + "'", expected);
      }
      case Tok::End:
        fail("unexpected end of input", kOperand);
      case Tok::RParen:
        fail("unbalanced ')'", kOperand);
      default:
        fail("unexpected '" + std::string(cur_.text) + "'", kOperand);
    }
  }

  // The parser keeps the tree as written, apart from folding literal
  // arithmetic, so that evaluation domain errors are preserved.
  static Expr combine(ExprKind kind, const Expr& a, const Expr& b) {
    if (a.kind() == ExprKind::Constant && b.kind() == ExprKind::Constant) {
      switch (kind) {
        case ExprKind::Add: return Expr::constant(a.value() + b.value());
        case ExprKind::Subtract: return Expr::constant(a.value() - b.value());
        case ExprKind::Multiply: return Expr::constant(a.value() * b.value());
        case ExprKind::Divide:
          if (b.value() != 0.0) return Expr::constant(a.value() / b.value());
          break;
        default: break;
      }
    }
    return Expr::unfolded(kind, a, b);
  }

  static Expr negate(const Expr& a) {
    if (a.kind() == ExprKind::Constant) return Expr::constant(-a.value());
    return Expr::unfolded(ExprKind::Negate, a);
  }

  static Expr power_node(const Expr& base, double e) {
    return Expr::unfolded(ExprKind::Power, base, Expr(), e);
  }

  std::string_view src_;
  std::span<const std::string> vars_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::size_t line_start_ = 0;
  Token cur_;
};

}  // namespace

ParseError::ParseError(const std::string& message, int line, int column,
                       std::vector<std::string> expected)
    : Error(describe(message, line, column, expected)),
      reason_(message),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

Expr parse(std::string_view text, std::span<const std::string> variables) {
  for (const auto& v : variables) {
    if (v == "pi") throw std::invalid_argument("'pi' cannot be a variable name");
  }
  return Parser(text, variables).parse_all();
}

}  // namespace rsode
