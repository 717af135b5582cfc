#include <cmath>
#include <sstream>

#include "rsode/errors.hpp"
#include "rsode/geometry.hpp"

namespace rsode {

namespace {

using Eigen::MatrixXd;

Expr t_var() { return Expr::variable(0); }

MatrixXd eval_matrix(const std::vector<std::vector<Expr>>& M, double t) {
  const auto n = static_cast<Eigen::Index>(M.size());
  MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out(i, j) = eval_real(M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], t);
  return out;
}

std::vector<std::vector<Expr>> differentiate_matrix(const std::vector<std::vector<Expr>>& M) {
  std::vector<std::vector<Expr>> out;
  for (const auto& row : M) {
    auto& r = out.emplace_back();
    for (const auto& e : row) r.push_back(differentiate(e));
  }
  return out;
}

double half_trace_solve(const MatrixXd& P, const MatrixXd& rhs) {
  Eigen::PartialPivLU<MatrixXd> lu(P);
  if (!(std::abs(lu.determinant()) > 0.0)) throw NumericalError("P(t) is singular");
  return 0.5 * lu.solve(rhs).trace();
}

std::string format_value(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

double horner(const std::vector<double>& c, double t, std::size_t from = 0) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > from;) acc = acc * t + c[k];
  return acc;
}

}  // namespace

double eval_table(const Table& c, double t, double a) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) {
    double row = 0.0;
    for (std::size_t e = c[k].size(); e-- > 0;) row = row * a + c[k][e];
    acc = acc * t + row;
  }
  return acc;
}

RealSeries eval_table(const Table& c, const RealSeries& t, const RealSeries& a) {
  const int K = std::min(t.order(), a.order());
  const RealSeries ts = t.truncated(K), as = a.truncated(K);
  std::size_t emax = 0;
  for (const auto& row : c) emax = std::max(emax, row.size());
  std::vector<RealSeries> apow{RealSeries::constant(1.0, K, ts.point())};
  for (std::size_t e = 1; e < emax; ++e) apow.push_back(apow.back() * as);
  RealSeries acc = RealSeries::zero(K, ts.point());
  RealSeries tpow = RealSeries::constant(1.0, K, ts.point());
  const bool nilpotent = ts[0] == 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (nilpotent && static_cast<int>(k) > K) break;
    RealSeries row = RealSeries::zero(K, ts.point());
    for (std::size_t e = 0; e < c[k].size(); ++e)
      if (c[k][e] != 0.0) row = row + apow[e] * c[k][e];
    acc = acc + tpow * row;
    tpow = tpow * ts;
  }
  return acc;
}

MetricFamily MetricFamily::diagonal(int dim_p, int dim_m, std::vector<Expr> entries, MetricOptions opts) {
  const int n = dim_p + dim_m;
  if (static_cast<int>(entries.size()) != n)
    throw ValidationError("diagonal metric needs dim_p + dim_m entries");
  std::vector<std::vector<Expr>> P(static_cast<std::size_t>(n), std::vector<Expr>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) P[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = entries[static_cast<std::size_t>(i)];
  MetricFamily f;
  f.p_ = dim_p;
  f.m_ = dim_m;
  f.opts_ = std::move(opts);
  f.P_ = std::move(P);
  f.finish(true);
  return f;
}

MetricFamily MetricFamily::block(int dim_p, int dim_m, const BlockSpec& s, MetricOptions opts) {
  const int p = dim_p, m = dim_m, n = p + m;
  auto check_const = [](const MatrixXd& M, int r, int c, const char* name) {
    if (M.size() == 0) return MatrixXd(MatrixXd::Zero(r, c));
    if (M.rows() != r || M.cols() != c) throw ValidationError(std::string("block ") + name + " has the wrong shape");
    return M;
  };
  auto check_expr = [](const std::vector<std::vector<Expr>>& M, int r, int c, const char* name) {
    if (M.empty()) return;
    if (static_cast<int>(M.size()) != r) throw ValidationError(std::string("block ") + name + " has the wrong shape");
    for (const auto& row : M)
      if (static_cast<int>(row.size()) != c) throw ValidationError(std::string("block ") + name + " has the wrong shape");
  };
  const MatrixXd A0 = check_const(s.A0, m, m, "A0");
  const MatrixXd A1 = check_const(s.A1, m, m, "A1");
  const MatrixXd C0 = check_const(s.C0, p, m, "C0");
  check_expr(s.B, p, p, "B");
  check_expr(s.A, m, m, "A");
  check_expr(s.C, p, m, "C");
  auto at = [](const std::vector<std::vector<Expr>>& M, int i, int j) {
    return M.empty() ? Expr() : M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  };

  const Expr t = t_var();
  const Expr t2 = Expr::power(t, 2), t3 = Expr::power(t, 3), t4 = Expr::power(t, 4);
  std::vector<std::vector<Expr>> P(static_cast<std::size_t>(n), std::vector<Expr>(static_cast<std::size_t>(n)));
  auto set = [&](int i, int j, const Expr& e) {
    P[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = e;
    P[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = e;
  };
  for (int i = 0; i < p; ++i)
    for (int j = i; j < p; ++j) set(i, j, (i == j ? t2 : Expr()) + t4 * at(s.B, i, j));
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j)
      set(p + i, p + j, Expr::constant(A0(i, j)) + Expr::constant(A1(i, j)) * t + t2 * at(s.A, i, j));
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < m; ++j) set(i, p + j, Expr::constant(C0(i, j)) * t2 + t3 * at(s.C, i, j));

  MetricFamily f;
  f.p_ = p;
  f.m_ = m;
  f.opts_ = std::move(opts);
  f.P_ = std::move(P);
  f.finish(false);
  return f;
}

MetricFamily MetricFamily::general(int dim_p, int dim_m, std::vector<std::vector<Expr>> P, MetricOptions opts) {
  const int n = dim_p + dim_m;
  if (static_cast<int>(P.size()) != n) throw ValidationError("metric matrix has the wrong size");
  for (const auto& row : P)
    if (static_cast<int>(row.size()) != n) throw ValidationError("metric matrix is not square");
  MetricFamily f;
  f.p_ = dim_p;
  f.m_ = dim_m;
  f.opts_ = std::move(opts);
  f.P_ = std::move(P);
  f.finish(false);
  return f;
}

void MetricFamily::finish(bool diagonal) {
  if (p_ < 0 || m_ < 0 || p_ + m_ < 1) throw ValidationError("metric dimensions must be nonnegative with a positive sum");
  if (!(opts_.t_switch > 0.0)) throw ValidationError("t_switch must be positive");
  if (!(opts_.t_validate > 1e-3)) throw ValidationError("t_validate must exceed 1e-3");
  if (opts_.series_order < 4 || opts_.series_order > 60) throw ValidationError("metric series order must be in 4..60");
  for (const auto& row : P_)
    for (const auto& e : row)
      if (e.max_variable() > 0) throw ValidationError("metric entries may only use the variable t");
  diagonal_ = diagonal;
  Pd_ = differentiate_matrix(P_);
  Pdd_ = differentiate_matrix(Pd_);
  if (opts_.conformal) {
    if (opts_.conformal->alpha.max_variable() > 0)
      throw ValidationError("conformal factor may only use the variable t");
    has_conformal_ = true;
    c_expr_ = Expr::constant(opts_.conformal->n) * differentiate(opts_.conformal->alpha);
  }
  build_series();
  validate();
}

void MetricFamily::build_series() {
  const int n = dim();
  const int Q = opts_.series_order;
  auto block_of = [this](int i) { return i < p_ ? 1 : 0; };
  auto mismatch = [this](const std::string& why) {
    double measured = std::numeric_limits<double>::quiet_NaN();
    try {
      measured = 1e-4 * drift_direct(1e-4);
    } catch (const Error&) {
    }
    throw ValidationError("pole-coefficient mismatch: t*drift -> " + format_value(measured) + " at t = 1e-4, expected " +
                          std::to_string(p_) + " (" + why + ")");
  };

  // Taylor data of P at 0 up to order Q + 2.
  std::vector<MatrixXd> Pk(static_cast<std::size_t>(Q + 3), MatrixXd::Zero(n, n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      RealSeries s;
      try {
        s = taylor(P_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], 0.0, Q + 2);
      } catch (const DomainError& e) {
        mismatch(std::string("entry not analytic at t = 0: ") + e.what());
      }
      for (int k = 0; k <= Q + 2; ++k) Pk[static_cast<std::size_t>(k)](i, j) = s[k];
    }
  }
  double scale = 1.0;
  for (const auto& M : Pk) scale = std::max(scale, M.cwiseAbs().maxCoeff());
  // R = S^{-1} P S^{-1}: the leading s_i + s_j coefficients of P_ij must vanish.
  std::vector<MatrixXd> R(static_cast<std::size_t>(Q + 1), MatrixXd::Zero(n, n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int need = block_of(i) + block_of(j);
      for (int k = 0; k < need; ++k)
        if (std::abs(Pk[static_cast<std::size_t>(k)](i, j)) > 1e-12 * scale) mismatch("low-order terms in the collapsing block");
      for (int k = 0; k <= Q; ++k) R[static_cast<std::size_t>(k)](i, j) = Pk[static_cast<std::size_t>(k + need)](i, j);
    }
  }
  Eigen::FullPivLU<MatrixXd> lu0(R[0]);
  if (!lu0.isInvertible()) mismatch("regular factor singular at t = 0");
  std::vector<MatrixXd> X(static_cast<std::size_t>(Q + 1));
  X[0] = lu0.inverse();
  for (int k = 1; k <= Q; ++k) {
    MatrixXd acc = MatrixXd::Zero(n, n);
    for (int j = 1; j <= k; ++j) acc += R[static_cast<std::size_t>(j)] * X[static_cast<std::size_t>(k - j)];
    X[static_cast<std::size_t>(k)] = -X[0] * acc;
  }

  auto table_for = [&](int m) {
    Table C(static_cast<std::size_t>(Q + 1), std::vector<double>(static_cast<std::size_t>(Q + 2), 0.0));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const int s = block_of(i) + block_of(j);
        for (int l = 0; l <= Q; ++l) {
          double d = Pk[static_cast<std::size_t>(l + m)](i, j);
          for (int f = 1; f <= m; ++f) d *= l + f;
          if (d == 0.0) continue;
          for (int kx = 0; kx <= Q; ++kx) {
            const int tp = kx + m - s + l;
            if (tp < 0) continue;  // vanishing by the low-order check above
            if (tp > Q) break;
            C[static_cast<std::size_t>(tp)][static_cast<std::size_t>(l)] +=
                0.5 * X[static_cast<std::size_t>(kx)](j, i) * d;
          }
        }
      }
    }
    return C;
  };
  C1_ = table_for(1);
  C2_ = table_for(2);

  const double tol = 1e-8 * (1.0 + p_);
  for (std::size_t e = 0; e < C1_[0].size(); ++e) {
    const double want1 = e == 1 ? p_ : 0.0, want2 = e == 0 ? p_ : 0.0;
    if (std::abs(C1_[0][e] - want1) > tol || std::abs(C2_[0][e] - want2) > tol)
      mismatch("leading singular coefficients differ from dim_p");
    C1_[0][e] = want1;
    C2_[0][e] = want2;
  }

  E_.assign(static_cast<std::size_t>(Q + 1), 0.0);
  for (int k = 0; k <= Q; ++k)
    for (double c : C1_[static_cast<std::size_t>(k)]) E_[static_cast<std::size_t>(k)] += c;
  L1_.assign(static_cast<std::size_t>(Q), std::vector<double>(static_cast<std::size_t>(Q + 2), 0.0));
  L2_ = L1_;
  for (int k = 0; k < Q; ++k) {
    for (int e = 0; e < Q + 2; ++e) {
      L1_[static_cast<std::size_t>(k)][static_cast<std::size_t>(e)] =
          C1_[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(e)] - (e == 1 ? E_[static_cast<std::size_t>(k + 1)] : 0.0);
      L2_[static_cast<std::size_t>(k)][static_cast<std::size_t>(e)] =
          C2_[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(e)] - (e == 0 ? E_[static_cast<std::size_t>(k + 1)] : 0.0);
    }
  }

  c_.assign(static_cast<std::size_t>(Q + 1), 0.0);
  if (has_conformal_) {
    try {
      c_ = taylor(c_expr_, 0.0, Q).coeffs();
    } catch (const DomainError& e) {
      throw ValidationError(std::string("conformal factor is not analytic at t = 0: ") + e.what());
    }
  }
}

void MetricFamily::validate() const {
  const int samples = 50;
  const double lo = std::log(1e-3), hi = std::log(opts_.t_validate);
  for (int i = 0; i < samples; ++i) {
    const double t = std::exp(lo + (hi - lo) * i / (samples - 1));
    MatrixXd M;
    try {
      M = P(t);
    } catch (const DomainError& e) {
      throw ValidationError("metric undefined at t = " + format_value(t) + ": " + e.what());
    }
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + M.cwiseAbs().maxCoeff()))
      throw ValidationError("metric is not symmetric at t = " + format_value(t));
    Eigen::LLT<MatrixXd> llt(M);
    if (llt.info() != Eigen::Success) throw ValidationError("metric is not positive definite at t = " + format_value(t));
  }
  for (double t : {1e-3, 1e-4}) {
    const double measured = t * drift_series(t);
    if (!(std::abs(measured - p_) < 1e-2))
      throw ValidationError("pole-coefficient mismatch: t*drift -> " + format_value(measured) + ", expected " +
                            std::to_string(p_));
  }
}

MatrixXd MetricFamily::P(double t) const { return eval_matrix(P_, t); }
MatrixXd MetricFamily::P_dot(double t) const { return eval_matrix(Pd_, t); }
MatrixXd MetricFamily::P_ddot(double t) const { return eval_matrix(Pdd_, t); }

double MetricFamily::drift_direct(double t) const { return half_trace_solve(P(t), P_dot(t)); }
double MetricFamily::drift_series(double t) const { return horner(E_, t) / t; }
double MetricFamily::drift(double t) const {
  if (!(t > 0.0)) throw DomainError("drift needs t > 0");
  return t < opts_.t_switch ? drift_series(t) : drift_direct(t);
}

double MetricFamily::potential_direct(double t, double rho) const { return half_trace_solve(P(t), P_dot(rho)); }
double MetricFamily::potential_series(double t, double rho) const { return eval_table(C1_, t, rho / t) / t; }
double MetricFamily::potential(double t, double rho) const {
  if (!(t > 0.0)) throw DomainError("potential needs t > 0");
  return t < opts_.t_switch ? potential_series(t, rho) : potential_direct(t, rho);
}

double MetricFamily::potential2_direct(double t, double rho) const { return half_trace_solve(P(t), P_ddot(rho)); }
double MetricFamily::potential2_series(double t, double rho) const { return eval_table(C2_, t, rho / t) / (t * t); }
double MetricFamily::potential2(double t, double rho) const {
  if (!(t > 0.0)) throw DomainError("potential needs t > 0");
  return t < opts_.t_switch ? potential2_series(t, rho) : potential2_direct(t, rho);
}

double MetricFamily::conformal_rate(double t) const {
  if (!has_conformal_) return 0.0;
  return t < opts_.t_switch ? horner(c_, t) : eval_real(c_expr_, t);
}

double MetricFamily::E(double t) const {
  return t < opts_.t_switch ? horner(E_, t) : t * drift_direct(t);
}

double MetricFamily::lambda1(double t, double a) const {
  if (t < opts_.t_switch) return eval_table(L1_, t, a);
  return half_trace_solve(P(t), P_dot(t * a) - a * P_dot(t));
}

double MetricFamily::lambda2(double t, double a) const {
  if (t < opts_.t_switch) return eval_table(L2_, t, a);
  return half_trace_solve(P(t), t * P_ddot(t * a) - P_dot(t));
}

}  // namespace rsode
