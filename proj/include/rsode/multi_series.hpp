#pragma once

// Multivariate truncated Taylor polynomials in n variables, total degree <= K.
// Used where mixed coefficients are needed (the weak-nonlinearity test).

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rsode {

class MultiSeries {
 public:
  struct Table;

  MultiSeries(int nvars, int order);
  static MultiSeries constant(double c, int nvars, int order);
  /// value + x_index
  static MultiSeries variable(int index, double value, int nvars, int order);

  int nvars() const noexcept;
  int order() const noexcept;
  std::size_t size() const noexcept { return coeffs_.size(); }

  double constant_term() const { return coeffs_[0]; }
  /// Coefficients in graded lexicographic monomial order, see monomials().
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  std::vector<double>& coeffs() noexcept { return coeffs_; }
  const std::vector<std::vector<int>>& monomials() const;
  double coeff(std::span<const int> exponents) const;

  /// Sum_j g[j] (x - x0)^j, x0 the constant term: composition of a univariate
  /// Taylor expansion about x0 with this polynomial.
  MultiSeries apply(std::span<const double> g) const;

  MultiSeries& operator+=(const MultiSeries& o);
  MultiSeries& operator-=(const MultiSeries& o);
  MultiSeries& operator*=(double s);

  friend MultiSeries operator*(const MultiSeries& a, const MultiSeries& b);

 private:
  std::shared_ptr<const Table> table_;
  std::vector<double> coeffs_;
};

MultiSeries operator+(MultiSeries a, const MultiSeries& b);
MultiSeries operator-(MultiSeries a, const MultiSeries& b);
MultiSeries operator-(MultiSeries a);
MultiSeries operator*(MultiSeries a, double s);
MultiSeries operator*(double s, MultiSeries a);
MultiSeries operator+(MultiSeries a, double s);
MultiSeries operator+(double s, MultiSeries a);
MultiSeries operator-(MultiSeries a, double s);
MultiSeries operator-(double s, MultiSeries a);
MultiSeries operator/(const MultiSeries& a, const MultiSeries& b);
MultiSeries operator/(MultiSeries a, double s);
MultiSeries operator/(double s, const MultiSeries& a);

MultiSeries reciprocal(const MultiSeries& a);
MultiSeries exp(const MultiSeries& a);
MultiSeries log(const MultiSeries& a);
MultiSeries sqrt(const MultiSeries& a);
MultiSeries sin(const MultiSeries& a);
MultiSeries cos(const MultiSeries& a);
MultiSeries tan(const MultiSeries& a);
MultiSeries sinh(const MultiSeries& a);
MultiSeries cosh(const MultiSeries& a);
MultiSeries tanh(const MultiSeries& a);
MultiSeries pow(const MultiSeries& a, double e);

/// "y1^2*y2" style rendering of an exponent vector.
std::string monomial_text(std::span<const int> exponents, std::span<const std::string> names);

}  // namespace rsode
