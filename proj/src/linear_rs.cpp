#include "rsode/linear_rs.hpp"

#include <cmath>
#include <numbers>

#include "rsode/dopri.hpp"
#include "rsode/errors.hpp"

namespace rsode {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_in_domain(const LinearRSSystem& sys, Complex z, const char* what) {
  if (std::isinf(sys.rho())) return;
  if (!(z.real() < std::log(sys.rho())))
    throw ValidationError(std::string(what) + " leaves the half-plane Re z < log(rho)");
}

DopriOptions options_for(double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  DopriOptions o;
  o.rtol = tol;
  o.atol = tol;
  o.keep_dense = false;
  return o;
}

double condition_number(const CMatrix& U) {
  Eigen::JacobiSVD<CMatrix> svd(U);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

}  // namespace

LinearRSSystem::LinearRSSystem(std::vector<std::vector<Expr>> A, std::vector<Expr> h, double rho)
    : n_(static_cast<int>(A.size())), rho_(rho), A_(std::move(A)), h_(std::move(h)) {
  if (n_ < 1) throw ValidationError("coefficient matrix is empty");
  if (n_ > kMaxLinearDim) throw ValidationError("dimension exceeds 64");
  if (!(rho_ > 0.0)) throw ValidationError("rho must be positive");
  for (const auto& row : A_) {
    if (static_cast<int>(row.size()) != n_) throw ValidationError("coefficient matrix is not square");
    for (const auto& e : row) {
      if (e.max_variable() > 0) throw ValidationError("coefficients may only use the variable s");
      try {
        (void)taylor_complex(e, 0.0, 1);
      } catch (const DomainError& err) {
        throw ValidationError(std::string("coefficient is not analytic at s = 0: ") + err.what());
      }
    }
  }
  if (!h_.empty() && static_cast<int>(h_.size()) != n_)
    throw ValidationError("inhomogeneity has the wrong length");
  for (const auto& e : h_)
    if (e.max_variable() > 0) throw ValidationError("inhomogeneity may only use the variable s");
}

LinearRSSystem LinearRSSystem::from_strings(const std::vector<std::vector<std::string>>& A,
                                            const std::vector<std::string>& h, double rho) {
  std::vector<std::vector<Expr>> a;
  for (const auto& row : A) {
    auto& r = a.emplace_back();
    for (const auto& s : row) r.push_back(parse(s, linear_variables()));
  }
  std::vector<Expr> hv;
  for (const auto& s : h) hv.push_back(parse(s, linear_variables()));
  return LinearRSSystem(std::move(a), std::move(hv), rho);
}

CMatrix LinearRSSystem::A_at(Complex s) const {
  CMatrix M(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) M(i, j) = eval_complex(A_[i][j], s);
  return M;
}

CVector LinearRSSystem::h_at(Complex s) const {
  CVector v = CVector::Zero(n_);
  for (int i = 0; i < static_cast<int>(h_.size()); ++i) v(i) = eval_complex(h_[i], s);
  return v;
}

FundamentalResult fundamental_solution(const LinearRSSystem& sys, Complex z0, Complex z1, double tol) {
  require_in_domain(sys, z0, "path start");
  require_in_domain(sys, z1, "path end");
  const int n = sys.dim();
  FundamentalResult out;
  if (z0 == z1) {
    out.U = CMatrix::Identity(n, n);
    out.condition = 1.0;
    return out;
  }
  const Complex dz = z1 - z0;
  auto rhs = [&](double tau, const CVector& y) -> CVector {
    const CMatrix A = sys.A_at(std::exp(z0 + tau * dz));
    CVector dy(n * n);
    Eigen::Map<const CMatrix> U(y.data(), n, n);
    Eigen::Map<CMatrix>(dy.data(), n, n).noalias() = -dz * (A * U);
    return dy;
  };
  CVector y0(n * n);
  Eigen::Map<CMatrix>(y0.data(), n, n).setIdentity();
  const auto res = dopri5<Complex>(rhs, 0.0, y0, 1.0, options_for(tol));
  out.U = Eigen::Map<const CMatrix>(res.y.data(), n, n);
  out.condition = condition_number(out.U);
  out.steps = res.accepted;
  out.est_error = res.error_sum;
  return out;
}

MonodromyResult monodromy_at(const LinearRSSystem& sys, double sigma, double tol) {
  if (!(sigma >= 0.0)) throw ValidationError("sigma must be nonnegative");
  if (!(sigma < sys.rho())) throw ValidationError("sigma must be below rho");
  const int n = sys.dim();
  const Complex I(0.0, 1.0);
  auto rhs = [&](double theta, const CVector& y) -> CVector {
    const CMatrix A = sys.A_at(sigma * std::exp(I * theta));
    CVector dy(n * n);
    Eigen::Map<const CMatrix> U(y.data(), n, n);
    Eigen::Map<CMatrix>(dy.data(), n, n).noalias() = -I * (A * U);
    return dy;
  };
  CVector y0(n * n);
  Eigen::Map<CMatrix>(y0.data(), n, n).setIdentity();
  const auto res = dopri5<Complex>(rhs, 0.0, y0, kTwoPi, options_for(tol));
  MonodromyResult out;
  out.sigma = sigma;
  out.M = Eigen::Map<const CMatrix>(res.y.data(), n, n);
  out.charpoly = conjugacy_invariants(out.M);
  out.path_steps = res.accepted;
  out.est_error = res.error_sum;
  return out;
}

CMatrix matrix_exp(const CMatrix& X) {
  const auto n = X.rows();
  const double norm = X.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm >= 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5))) + 1;
  const CMatrix Y = X / std::ldexp(1.0, squarings);
  CMatrix result = CMatrix::Identity(n, n);
  CMatrix term = CMatrix::Identity(n, n);
  for (int k = 1; k <= 40; ++k) {
    term = term * Y / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() <= 1e-18 * result.cwiseAbs().maxCoeff()) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

CMatrix monodromy_generator(const CMatrix& A0) {
  return matrix_exp(Complex(0.0, -kTwoPi) * A0);
}

std::vector<Complex> conjugacy_invariants(const CMatrix& M) {
  const auto n = M.rows();
  std::vector<Complex> c(static_cast<std::size_t>(n + 1));
  c[0] = 1.0;
  CMatrix Mk = CMatrix::Zero(n, n);
  const CMatrix I = CMatrix::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    Mk = M * Mk + c[static_cast<std::size_t>(k - 1)] * I;
    c[static_cast<std::size_t>(k)] = -(M * Mk).trace() / static_cast<double>(k);
  }
  return c;
}

CMatrix polynomial_at_matrix(const std::vector<Complex>& coeffs, const CMatrix& M) {
  const auto n = M.rows();
  CMatrix r = CMatrix::Zero(n, n);
  for (const Complex& c : coeffs) r = r * M + c * CMatrix::Identity(n, n);
  return r;
}

CVector solve_inhomogeneous(const LinearRSSystem& sys, Complex z0, const CVector& Y0, Complex z1,
                            double tol) {
  require_in_domain(sys, z0, "path start");
  require_in_domain(sys, z1, "path end");
  const int n = sys.dim();
  if (Y0.size() != n) throw std::invalid_argument("initial vector has the wrong length");
  if (z0 == z1) return Y0;
  const Complex dz = z1 - z0;
  const int nn = n * n;
  auto rhs = [&](double tau, const CVector& y) -> CVector {
    const Complex z = z0 + tau * dz;
    const Complex s = std::exp(z);
    const CMatrix A = sys.A_at(s);
    Eigen::Map<const CMatrix> U(y.data(), n, n);
    Eigen::Map<const CMatrix> V(y.data() + nn, n, n);
    CVector dy(2 * nn + n);
    Eigen::Map<CMatrix>(dy.data(), n, n).noalias() = -dz * (A * U);
    Eigen::Map<CMatrix>(dy.data() + nn, n, n).noalias() = dz * (V * A);
    if (sys.homogeneous())
      dy.tail(n).setZero();
    else
      dy.tail(n).noalias() = (dz * s) * (V * sys.h_at(s));
    return dy;
  };
  CVector y0 = CVector::Zero(2 * nn + n);
  Eigen::Map<CMatrix>(y0.data(), n, n).setIdentity();
  Eigen::Map<CMatrix>(y0.data() + nn, n, n).setIdentity();
  const auto res = dopri5<Complex>(rhs, 0.0, y0, 1.0, options_for(tol));
  Eigen::Map<const CMatrix> U(res.y.data(), n, n);
  return U * (Y0 + res.y.tail(n));
}

}  // namespace rsode
