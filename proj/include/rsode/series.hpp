#pragma once

// Truncated power series c_0 + c_1 (t - t0) + ... + c_K (t - t0)^K over real
// or complex coefficients. Binary operations truncate to the smaller order.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "rsode/errors.hpp"

namespace rsode {

template <class T>
class Series {
 public:
  using value_type = T;

  Series() : coeffs_(1, T{}) {}
  explicit Series(std::vector<T> coeffs, double point = 0.0)
      : coeffs_(std::move(coeffs)), point_(point) {
    if (coeffs_.empty()) throw std::invalid_argument("series needs at least one coefficient");
  }

  static Series constant(T value, int order, double point = 0.0) {
    std::vector<T> c(static_cast<std::size_t>(order) + 1, T{});
    c[0] = value;
    return Series(std::move(c), point);
  }
  static Series zero(int order, double point = 0.0) { return constant(T{}, order, point); }
  /// The expansion variable itself: [point, 1, 0, ...].
  static Series identity(double point, int order) {
    auto s = constant(T(point), order, point);
    if (order >= 1) s.coeffs_[1] = T(1);
    return s;
  }

  int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  double point() const noexcept { return point_; }
  const std::vector<T>& coeffs() const noexcept { return coeffs_; }
  const T& operator[](int k) const { return coeffs_[static_cast<std::size_t>(k)]; }
  T& operator[](int k) { return coeffs_[static_cast<std::size_t>(k)]; }
  /// Coefficient k, or zero beyond the truncation order.
  T coeff(int k) const { return k <= order() && k >= 0 ? (*this)[k] : T{}; }

  Series truncated(int order) const {
    std::vector<T> c(coeffs_.begin(), coeffs_.begin() + std::min(order, this->order()) + 1);
    c.resize(static_cast<std::size_t>(order) + 1, T{});
    return Series(std::move(c), point_);
  }

  Series& operator*=(T s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }

 private:
  std::vector<T> coeffs_;
  double point_ = 0.0;
};

using RealSeries = Series<double>;
using ComplexSeries = Series<std::complex<double>>;

namespace series_detail {

template <class T>
void require_same_point(const Series<T>& a, const Series<T>& b) {
  if (a.point() != b.point()) throw std::invalid_argument("mismatched expansion points");
}

template <class T>
bool is_zero(const T& x) {
  return x == T{};
}

}  // namespace series_detail

template <class T>
Series<T> operator+(const Series<T>& a, const Series<T>& b) {
  series_detail::require_same_point(a, b);
  const int k = std::min(a.order(), b.order());
  auto r = Series<T>::zero(k, a.point());
  for (int i = 0; i <= k; ++i) r[i] = a[i] + b[i];
  return r;
}

template <class T>
Series<T> operator-(const Series<T>& a, const Series<T>& b) {
  series_detail::require_same_point(a, b);
  const int k = std::min(a.order(), b.order());
  auto r = Series<T>::zero(k, a.point());
  for (int i = 0; i <= k; ++i) r[i] = a[i] - b[i];
  return r;
}

template <class T>
Series<T> operator-(const Series<T>& a) {
  auto r = a;
  r *= T(-1);
  return r;
}

template <class T>
Series<T> operator*(const Series<T>& a, const Series<T>& b) {
  series_detail::require_same_point(a, b);
  const int k = std::min(a.order(), b.order());
  auto r = Series<T>::zero(k, a.point());
  for (int i = 0; i <= k; ++i) {
    if (series_detail::is_zero(a[i])) continue;
    for (int j = 0; i + j <= k; ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

template <class T>
Series<T> operator+(const Series<T>& a, T s) {
  auto r = a;
  r[0] += s;
  return r;
}
template <class T>
Series<T> operator+(T s, const Series<T>& a) {
  return a + s;
}
template <class T>
Series<T> operator-(const Series<T>& a, T s) {
  auto r = a;
  r[0] -= s;
  return r;
}
template <class T>
Series<T> operator-(T s, const Series<T>& a) {
  auto r = -a;
  r[0] += s;
  return r;
}
template <class T>
Series<T> operator*(const Series<T>& a, T s) {
  auto r = a;
  r *= s;
  return r;
}
template <class T>
Series<T> operator*(T s, const Series<T>& a) {
  return a * s;
}

template <class T>
Series<T> reciprocal(const Series<T>& a) {
  if (series_detail::is_zero(a[0])) throw DomainError("reciprocal of a series with zero constant term");
  const int k = a.order();
  auto r = Series<T>::zero(k, a.point());
  const T inv0 = T(1) / a[0];
  r[0] = inv0;
  for (int n = 1; n <= k; ++n) {
    T acc{};
    for (int j = 1; j <= n; ++j) acc += a[j] * r[n - j];
    r[n] = -acc * inv0;
  }
  return r;
}

template <class T>
Series<T> operator/(const Series<T>& a, const Series<T>& b) {
  series_detail::require_same_point(a, b);
  if (series_detail::is_zero(b[0])) throw DomainError("division by a series with zero constant term");
  const int k = std::min(a.order(), b.order());
  auto q = Series<T>::zero(k, a.point());
  const T inv0 = T(1) / b[0];
  for (int n = 0; n <= k; ++n) {
    T acc = a[n];
    for (int j = 1; j <= n; ++j) acc -= b[j] * q[n - j];
    q[n] = acc * inv0;
  }
  return q;
}

template <class T>
Series<T> operator/(const Series<T>& a, T s) {
  if (series_detail::is_zero(s)) throw DomainError("division by zero");
  return a * (T(1) / s);
}

template <class T>
Series<T> operator/(T s, const Series<T>& a) {
  return reciprocal(a) * s;
}

/// Formal derivative d/dt; the result has order K-1 (order 0 for constants).
template <class T>
Series<T> derivative(const Series<T>& a) {
  const int k = std::max(a.order() - 1, 0);
  auto r = Series<T>::zero(k, a.point());
  for (int n = 0; n + 1 <= a.order(); ++n) r[n] = a[n + 1] * T(n + 1);
  return r;
}

/// Drops the first m coefficients: division by (t - t0)^m for a series whose
/// leading m coefficients vanish. Callers verify the vanishing.
template <class T>
Series<T> shift_down(const Series<T>& a, int m) {
  const int k = a.order() - m;
  if (k < 0) throw std::invalid_argument("shift exceeds series order");
  std::vector<T> c(a.coeffs().begin() + m, a.coeffs().end());
  return Series<T>(std::move(c), a.point());
}

/// Multiplication by (t - t0)^m, keeping the order.
template <class T>
Series<T> shift_up(const Series<T>& a, int m) {
  auto r = Series<T>::zero(a.order(), a.point());
  for (int n = 0; n + m <= a.order(); ++n) r[n + m] = a[n];
  return r;
}

/// outer(inner(t)). The constant term of inner must equal the expansion
/// point of outer; the result is expanded about the point of inner.
template <class T>
Series<T> compose(const Series<T>& outer, const Series<T>& inner) {
  if (std::abs(inner[0] - T(outer.point())) > 1e-14 * (1.0 + std::abs(outer.point())))
    throw std::invalid_argument("compose: inner constant term differs from the outer expansion point");
  const int k = std::min(outer.order(), inner.order());
  auto dz = inner.truncated(k);
  dz[0] = T{};
  auto r = Series<T>::constant(outer[outer.order()], k, inner.point());
  for (int n = outer.order() - 1; n >= 0; --n) r = r * dz + outer[n];
  return r;
}

template <class T>
struct TruncatedValue {
  T value;
  /// Heuristic size of the omitted tail, |c_K| |dt|^K.
  double remainder;
};

template <class T>
TruncatedValue<T> eval_truncated(const Series<T>& a, double dt) {
  T acc = a[a.order()];
  for (int n = a.order() - 1; n >= 0; --n) acc = acc * dt + a[n];
  const double rem = std::abs(a[a.order()]) * std::pow(std::abs(dt), a.order());
  return {acc, rem};
}

/// Horner evaluation of the derivative of the truncated polynomial.
template <class T>
T eval_derivative(const Series<T>& a, double dt) {
  if (a.order() == 0) return T{};
  T acc = a[a.order()] * T(a.order());
  for (int n = a.order() - 1; n >= 1; --n) acc = acc * dt + a[n] * T(n);
  return acc;
}

// Elementary functions by the usual Taylor-mode recurrences.

template <class T>
Series<T> exp(const Series<T>& a) {
  const int k = a.order();
  auto r = Series<T>::zero(k, a.point());
  r[0] = std::exp(a[0]);
  for (int n = 1; n <= k; ++n) {
    T acc{};
    for (int j = 1; j <= n; ++j) acc += T(j) * a[j] * r[n - j];
    r[n] = acc / T(n);
  }
  return r;
}

template <class T>
Series<T> log(const Series<T>& a) {
  if constexpr (std::is_same_v<T, double>) {
    if (!(a[0] > 0.0)) throw DomainError("log of a nonpositive real");
  } else {
    if (a[0] == T{}) throw DomainError("log at zero");
  }
  const int k = a.order();
  auto r = Series<T>::zero(k, a.point());
  r[0] = std::log(a[0]);
  for (int n = 1; n <= k; ++n) {
    T acc = a[n];
    for (int j = 1; j < n; ++j) acc -= T(j) * r[j] * a[n - j] / T(n);
    r[n] = acc / a[0];
  }
  return r;
}

template <class T>
Series<T> sqrt(const Series<T>& a) {
  if constexpr (std::is_same_v<T, double>) {
    if (a[0] < 0.0) throw DomainError("sqrt of a negative real");
  }
  if (a[0] == T{} && a.order() >= 1) throw DomainError("sqrt at a branch point");
  const int k = a.order();
  auto r = Series<T>::zero(k, a.point());
  r[0] = std::sqrt(a[0]);
  for (int n = 1; n <= k; ++n) {
    T acc = a[n];
    for (int j = 1; j < n; ++j) acc -= r[j] * r[n - j];
    r[n] = acc / (T(2) * r[0]);
  }
  return r;
}

/// sin and cos propagated jointly.
template <class T>
std::pair<Series<T>, Series<T>> sin_cos(const Series<T>& a) {
  const int k = a.order();
  auto s = Series<T>::zero(k, a.point());
  auto c = Series<T>::zero(k, a.point());
  s[0] = std::sin(a[0]);
  c[0] = std::cos(a[0]);
  for (int n = 1; n <= k; ++n) {
    T as{}, ac{};
    for (int j = 1; j <= n; ++j) {
      as += T(j) * a[j] * c[n - j];
      ac += T(j) * a[j] * s[n - j];
    }
    s[n] = as / T(n);
    c[n] = -ac / T(n);
  }
  return {s, c};
}

template <class T>
std::pair<Series<T>, Series<T>> sinh_cosh(const Series<T>& a) {
  const int k = a.order();
  auto s = Series<T>::zero(k, a.point());
  auto c = Series<T>::zero(k, a.point());
  s[0] = std::sinh(a[0]);
  c[0] = std::cosh(a[0]);
  for (int n = 1; n <= k; ++n) {
    T as{}, ac{};
    for (int j = 1; j <= n; ++j) {
      as += T(j) * a[j] * c[n - j];
      ac += T(j) * a[j] * s[n - j];
    }
    s[n] = as / T(n);
    c[n] = ac / T(n);
  }
  return {s, c};
}

template <class T>
Series<T> sin(const Series<T>& a) {
  return sin_cos(a).first;
}
template <class T>
Series<T> cos(const Series<T>& a) {
  return sin_cos(a).second;
}
template <class T>
Series<T> tan(const Series<T>& a) {
  auto [s, c] = sin_cos(a);
  return s / c;
}
template <class T>
Series<T> sinh(const Series<T>& a) {
  return sinh_cosh(a).first;
}
template <class T>
Series<T> cosh(const Series<T>& a) {
  return sinh_cosh(a).second;
}
template <class T>
Series<T> tanh(const Series<T>& a) {
  auto [s, c] = sinh_cosh(a);
  return s / c;
}

/// Integer power by repeated squaring; negative exponents go through the
/// reciprocal.
template <class T>
Series<T> pow_int(const Series<T>& a, long long n) {
  if (n < 0) return pow_int(reciprocal(a), -n);
  auto result = Series<T>::constant(T(1), a.order(), a.point());
  auto base = a;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

/// a^e for a real exponent, rewritten as exp(e log a) unless e is integral.
template <class T>
Series<T> pow(const Series<T>& a, double e) {
  if (std::floor(e) == e && std::abs(e) < 1e9) return pow_int(a, static_cast<long long>(e));
  if (a[0] == T{}) {
    if (a.order() == 0 && e > 0.0) return Series<T>::zero(0, a.point());
    throw DomainError("non-integer power at a branch point");
  }
  if constexpr (std::is_same_v<T, double>) {
    if (a[0] < 0.0) throw DomainError("non-integer power of a negative real");
  }
  return exp(log(a) * T(e));
}

}  // namespace rsode
