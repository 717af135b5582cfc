#include "rsode/multi_series.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "rsode/errors.hpp"
#include "rsode/series.hpp"

namespace rsode {

struct MultiSeries::Table {
  int nvars;
  int order;
  std::vector<std::vector<int>> monomials;
  std::vector<int> degree;
  std::map<std::vector<int>, int> index;
  // (i, j, k): monomial i times monomial j is monomial k
  std::vector<std::tuple<int, int, int>> products;
};

namespace {

void enumerate(int nvars, int degree, int pos, std::vector<int>& cur,
               std::vector<std::vector<int>>& out) {
  if (pos == nvars - 1) {
    cur[static_cast<std::size_t>(pos)] = degree;
    out.push_back(cur);
    return;
  }
  for (int d = degree; d >= 0; --d) {
    cur[static_cast<std::size_t>(pos)] = d;
    enumerate(nvars, degree - d, pos + 1, cur, out);
  }
}

std::shared_ptr<const MultiSeries::Table> table_for(int nvars, int order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const MultiSeries::Table>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find({nvars, order});
  if (it != cache.end()) return it->second;

  auto t = std::make_shared<MultiSeries::Table>();
  t->nvars = nvars;
  t->order = order;
  std::vector<int> cur(static_cast<std::size_t>(nvars), 0);
  for (int d = 0; d <= order; ++d) {
    std::vector<std::vector<int>> layer;
    enumerate(nvars, d, 0, cur, layer);
    for (auto& m : layer) {
      t->index[m] = static_cast<int>(t->monomials.size());
      t->monomials.push_back(m);
      t->degree.push_back(d);
    }
  }
  const int n = static_cast<int>(t->monomials.size());
  std::vector<int> sum(static_cast<std::size_t>(nvars));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (t->degree[i] + t->degree[j] > order) continue;
      for (int v = 0; v < nvars; ++v)
        sum[v] = t->monomials[i][v] + t->monomials[j][v];
      t->products.emplace_back(i, j, t->index.at(sum));
    }
  }
  cache[{nvars, order}] = t;
  return t;
}

}  // namespace

MultiSeries::MultiSeries(int nvars, int order) {
  if (nvars < 1 || order < 0) throw std::invalid_argument("bad multivariate series shape");
  table_ = table_for(nvars, order);
  coeffs_.assign(table_->monomials.size(), 0.0);
}

MultiSeries MultiSeries::constant(double c, int nvars, int order) {
  MultiSeries m(nvars, order);
  m.coeffs_[0] = c;
  return m;
}

MultiSeries MultiSeries::variable(int index, double value, int nvars, int order) {
  MultiSeries m = constant(value, nvars, order);
  if (order >= 1) m.coeffs_[static_cast<std::size_t>(1 + index)] = 1.0;
  return m;
}

int MultiSeries::nvars() const noexcept { return table_->nvars; }
int MultiSeries::order() const noexcept { return table_->order; }
const std::vector<std::vector<int>>& MultiSeries::monomials() const { return table_->monomials; }

double MultiSeries::coeff(std::span<const int> exponents) const {
  auto it = table_->index.find(std::vector<int>(exponents.begin(), exponents.end()));
  return it == table_->index.end() ? 0.0 : coeffs_[static_cast<std::size_t>(it->second)];
}

MultiSeries& MultiSeries::operator+=(const MultiSeries& o) {
  if (o.table_ != table_) throw std::invalid_argument("mismatched multivariate series shapes");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

MultiSeries& MultiSeries::operator-=(const MultiSeries& o) {
  if (o.table_ != table_) throw std::invalid_argument("mismatched multivariate series shapes");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

MultiSeries& MultiSeries::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

MultiSeries operator*(const MultiSeries& a, const MultiSeries& b) {
  if (a.table_ != b.table_) throw std::invalid_argument("mismatched multivariate series shapes");
  MultiSeries r(a.nvars(), a.order());
  for (const auto& [i, j, k] : a.table_->products) {
    const double ai = a.coeffs_[static_cast<std::size_t>(i)];
    if (ai == 0.0) continue;
    r.coeffs_[static_cast<std::size_t>(k)] += ai * b.coeffs_[static_cast<std::size_t>(j)];
  }
  return r;
}

MultiSeries MultiSeries::apply(std::span<const double> g) const {
  MultiSeries dx = *this;
  dx.coeffs_[0] = 0.0;
  const int k = std::min<int>(order(), static_cast<int>(g.size()) - 1);
  MultiSeries r = constant(g[static_cast<std::size_t>(k)], nvars(), order());
  for (int n = k - 1; n >= 0; --n) {
    r = r * dx;
    r.coeffs_[0] += g[static_cast<std::size_t>(n)];
  }
  return r;
}

MultiSeries operator+(MultiSeries a, const MultiSeries& b) { return a += b; }
MultiSeries operator-(MultiSeries a, const MultiSeries& b) { return a -= b; }
MultiSeries operator-(MultiSeries a) { return a *= -1.0; }
MultiSeries operator*(MultiSeries a, double s) { return a *= s; }
MultiSeries operator*(double s, MultiSeries a) { return a *= s; }
MultiSeries operator+(MultiSeries a, double s) {
  a.coeffs()[0] += s;
  return a;
}
MultiSeries operator+(double s, MultiSeries a) { return std::move(a) + s; }
MultiSeries operator-(MultiSeries a, double s) {
  a.coeffs()[0] -= s;
  return a;
}
MultiSeries operator-(double s, MultiSeries a) { return s + (-std::move(a)); }

namespace {

// Univariate Taylor coefficients of f about the constant term of a.
template <class F>
MultiSeries via_univariate(const MultiSeries& a, F&& f) {
  const auto x = RealSeries::identity(a.constant_term(), a.order());
  const RealSeries g = f(x);
  return a.apply(g.coeffs());
}

}  // namespace

MultiSeries reciprocal(const MultiSeries& a) {
  if (a.constant_term() == 0.0) throw DomainError("reciprocal of a series with zero constant term");
  return via_univariate(a, [](const RealSeries& x) { return reciprocal(x); });
}

MultiSeries operator/(const MultiSeries& a, const MultiSeries& b) { return a * reciprocal(b); }
MultiSeries operator/(MultiSeries a, double s) {
  if (s == 0.0) throw DomainError("division by zero");
  return a *= 1.0 / s;
}
MultiSeries operator/(double s, const MultiSeries& a) { return reciprocal(a) * s; }

MultiSeries exp(const MultiSeries& a) {
  return via_univariate(a, [](const RealSeries& x) { return exp(x); });
}
MultiSeries log(const MultiSeries& a) {
  return via_univariate(a, [](const RealSeries& x) { return log(x); });
}
MultiSeries sqrt(const MultiSeries& a) {
  return via_univariate(a, [](const RealSeries& x) { return sqrt(x); });
}
MultiSeries sin(const MultiSeries& a) {
  return via_univariate(a, [](const RealSeries& x) { return sin(x); });
}
MultiSeries cos(const MultiSeries& a) {
  return via_univariate(a, [](const RealSeries& x) { return cos(x); });
}
MultiSeries tan(const MultiSeries& a) {
  return via_univariate(a, [](const RealSeries& x) { return tan(x); });
}
MultiSeries sinh(const MultiSeries& a) {
  return via_univariate(a, [](const RealSeries& x) { return sinh(x); });
}
MultiSeries cosh(const MultiSeries& a) {
  return via_univariate(a, [](const RealSeries& x) { return cosh(x); });
}
MultiSeries tanh(const MultiSeries& a) {
  return via_univariate(a, [](const RealSeries& x) { return tanh(x); });
}
MultiSeries pow(const MultiSeries& a, double e) {
  return via_univariate(a, [e](const RealSeries& x) { return pow(x, e); });
}

std::string monomial_text(std::span<const int> exponents, std::span<const std::string> names) {
  std::string out;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (exponents[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += i < names.size() ? names[i] : "x" + std::to_string(i + 1);
    if (exponents[i] > 1) out += "^" + std::to_string(exponents[i]);
  }
  return out.empty() ? "1" : out;
}

}  // namespace rsode
