#include "rsode/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "rsode/errors.hpp"
#include "rsode/geometry.hpp"
#include "rsode/linear_rs.hpp"
#include "rsode/singular_ivp.hpp"

namespace rsode::cli {

namespace {

using json = nlohmann::ordered_json;

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IOError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Output

void write_json(std::ostream& os, const json& j, int indent, int level) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * level), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(k).dump() << ": ";
        write_json(os, v, indent, level + 1);
      }
      os << "\n" << close << "}";
      return;
    }
    case json::value_t::array: {
      // numeric leaves stay on one line
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return !e.is_structured(); });
      if (j.empty() || flat) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write_json(os, j[i], indent, level + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write_json(os, j[i], indent, level + 1);
      }
      os << "\n" << close << "]";
      return;
    }
    case json::value_t::number_float: {
      const double x = j.get<double>();
      if (std::isfinite(x))
        os << format_number(x);
      else
        os << json(format_number(x)).dump();
      return;
    }
    default:
      os << j.dump();
  }
}

std::string to_text(const json& j) {
  std::ostringstream os;
  write_json(os, j, 2, 0);
  os << "\n";
  return os.str();
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const CMatrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(complex_json(M(i, j)));
    rows.push_back(row);
  }
  return rows;
}

json matrix_json(const MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json report_json(const AdmissibilityReport& r) {
  return json{{"pass", r.pass},
              {"residual_norm", r.residual_norm},
              {"jacobian", matrix_json(r.jacobian)},
              {"offending_h", r.offending_h},
              {"checked_up_to", r.checked_up_to},
              {"tail_certified", r.tail_certified}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IOError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IOError("write to " + path.string() + " failed");
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
    os_ << "\n";
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) os_ << (i ? "," : "") << format_number(values[i]);
    os_ << "\n";
  }
  std::string text() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

// ---------------------------------------------------------------------------
// Config access

class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + " must be an object");
  }

  /// Rejects keys outside the allowed set.
  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items())
      if (!ok.count(k)) throw ConfigError("unknown key '" + k + "' in " + where_);
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const json& at(const std::string& key) const {
    if (!j_.contains(key)) throw ConfigError("missing key '" + key + "' in " + where_);
    return j_.at(key);
  }
  Reader object(const std::string& key) const { return Reader(at(key), where_ + "." + key); }

  double number(const std::string& key) const { return as_number(at(key), key); }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }
  int integer(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_number_integer()) throw ConfigError("'" + key + "' in " + where_ + " must be an integer");
    return v.get<int>();
  }
  int integer(const std::string& key, int fallback) const { return has(key) ? integer(key) : fallback; }

  std::string expression(const json& v, const std::string& key) const {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return format_number(v.get<double>());
    throw ConfigError("'" + key + "' in " + where_ + " must hold expression strings");
  }
  std::vector<std::string> expressions(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_array()) throw ConfigError("'" + key + "' in " + where_ + " must be an array");
    std::vector<std::string> out;
    for (const auto& e : v) out.push_back(expression(e, key));
    return out;
  }
  std::vector<std::vector<std::string>> expression_matrix(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_array()) throw ConfigError("'" + key + "' in " + where_ + " must be an array of rows");
    std::vector<std::vector<std::string>> out;
    for (const auto& row : v) {
      if (!row.is_array()) throw ConfigError("'" + key + "' in " + where_ + " must be an array of rows");
      std::vector<std::string> r;
      for (const auto& e : row) r.push_back(expression(e, key));
      out.push_back(std::move(r));
    }
    return out;
  }
  std::vector<double> numbers(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_array()) return {as_number(v, key)};
    std::vector<double> out;
    for (const auto& e : v) out.push_back(as_number(e, key));
    return out;
  }
  Eigen::MatrixXd real_matrix(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_array() || v.empty()) throw ConfigError("'" + key + "' in " + where_ + " must be an array of rows");
    Eigen::MatrixXd M(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v[0].size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_array() || v[i].size() != v[0].size())
        throw ConfigError("'" + key + "' in " + where_ + " has ragged rows");
      for (std::size_t j = 0; j < v[i].size(); ++j)
        M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = as_number(v[i][j], key);
    }
    return M;
  }
  Complex complex(const std::string& key) const {
    const json& v = at(key);
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2) return {as_number(v[0], key), as_number(v[1], key)};
    throw ConfigError("'" + key + "' in " + where_ + " must be a number or [re, im]");
  }

 private:
  double as_number(const json& v, const std::string& key) const {
    if (!v.is_number()) throw ConfigError("'" + key + "' in " + where_ + " must be a number");
    return v.get<double>();
  }

  const json& j_;
  std::string where_;
};

std::vector<std::vector<Expr>> parse_matrix(const std::vector<std::vector<std::string>>& m,
                                            const std::vector<std::string>& vars = default_variables()) {
  std::vector<std::vector<Expr>> out;
  for (const auto& row : m) {
    std::vector<Expr> r;
    for (const auto& s : row) r.push_back(parse(s, vars));
    out.push_back(std::move(r));
  }
  return out;
}

MetricFamily build_metric(const Reader& m) {
  m.allow({"p", "m", "diagonal", "matrix", "block", "t_switch", "t_validate", "series_order", "conformal"});
  const int p = m.integer("p");
  const int q = m.integer("m");
  MetricOptions opts;
  opts.t_switch = m.number("t_switch", opts.t_switch);
  opts.t_validate = m.number("t_validate", opts.t_validate);
  opts.series_order = m.integer("series_order", opts.series_order);
  if (m.has("conformal")) {
    const Reader c = m.object("conformal");
    c.allow({"alpha", "n"});
    opts.conformal = ConformalFactor{parse(c.expression(c.at("alpha"), "alpha")), c.integer("n")};
  }
  const int forms = int(m.has("diagonal")) + int(m.has("matrix")) + int(m.has("block"));
  if (forms != 1) throw ConfigError("metric needs exactly one of 'diagonal', 'matrix', 'block'");
  if (m.has("diagonal")) {
    std::vector<Expr> d;
    for (const auto& s : m.expressions("diagonal")) d.push_back(parse(s));
    return MetricFamily::diagonal(p, q, std::move(d), opts);
  }
  if (m.has("matrix")) return MetricFamily::general(p, q, parse_matrix(m.expression_matrix("matrix")), opts);
  const Reader b = m.object("block");
  b.allow({"A0", "A1", "C0", "B", "A", "C"});
  BlockSpec spec;
  spec.A0 = b.has("A0") ? b.real_matrix("A0") : Eigen::MatrixXd::Identity(q, q);
  spec.A1 = b.has("A1") ? b.real_matrix("A1") : Eigen::MatrixXd::Zero(q, q);
  spec.C0 = b.has("C0") ? b.real_matrix("C0") : Eigen::MatrixXd::Zero(p, q);
  if (b.has("B")) spec.B = parse_matrix(b.expression_matrix("B"));
  if (b.has("A")) spec.A = parse_matrix(b.expression_matrix("A"));
  if (b.has("C")) spec.C = parse_matrix(b.expression_matrix("C"));
  return MetricFamily::block(p, q, spec, opts);
}

LinearRSSystem build_system(const Reader& s) {
  s.allow({"A", "h", "rho"});
  const auto A = s.expression_matrix("A");
  const std::vector<std::string> h = s.has("h") ? s.expressions("h") : std::vector<std::string>{};
  return LinearRSSystem::from_strings(A, h, s.number("rho", std::numeric_limits<double>::infinity()));
}

SingularIVP build_singular(const Reader& c, double t_end) {
  const auto sing = c.expressions("singular");
  const auto reg = c.expressions("regular");
  const auto y0 = c.numbers("y0");
  if (sing.size() != reg.size() || sing.size() != y0.size())
    throw ConfigError("'singular', 'regular' and 'y0' must have the same length");
  SingularIVP p;
  p.singular = ExprField::from_strings(sing);
  p.regular = ExprField::from_strings(reg);
  p.y0 = Eigen::Map<const VectorXd>(y0.data(), static_cast<Eigen::Index>(y0.size()));
  p.t_end = t_end;
  return p;
}

std::vector<double> sweep_values(const json& spec, const std::string& key) {
  double start = 0.0, stop = 0.0;
  int count = 0;
  if (spec.is_string()) {
    const std::string s = spec.get<std::string>();
    double a = 0.0, b = 0.0;
    int n = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d%c", &a, &b, &n, &tail) != 3)
      throw ConfigError("sweep '" + key + "' must have the form start:stop:count");
    start = a, stop = b, count = n;
  } else {
    const Reader r(spec, key);
    r.allow({"start", "stop", "count"});
    start = r.number("start");
    stop = r.number("stop");
    count = r.integer("count");
  }
  if (count < 1) throw ConfigError("sweep '" + key + "' needs a positive count");
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
  return out;
}

/// Runs f on every index with at most hardware_concurrency tasks in flight;
/// results keep input order.
template <class R>
std::vector<R> run_parallel(std::size_t n, const std::function<R(std::size_t)>& f) {
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  std::vector<R> out;
  out.reserve(n);
  for (std::size_t base = 0; base < n; base += width) {
    std::vector<std::future<R>> batch;
    for (std::size_t i = base; i < std::min(n, base + width); ++i) batch.push_back(std::async(std::launch::async, f, i));
    for (auto& fut : batch) out.push_back(fut.get());
  }
  return out;
}

/// Central differences inside, one-sided at the ends.
std::vector<double> finite_differences(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
    d[i] = (y[hi] - y[lo]) / (x[hi] - x[lo]);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Commands

struct Flags {
  std::string config;
  std::string out;
  std::optional<double> tol;
  std::optional<int> order;
  bool quiet = false;
};

struct Outcome {
  json summary;
  std::string csv;  // empty when the command has no trajectory
  int code = kOk;
};

SolveOptions solve_options(const Reader& c, const Flags& f) {
  SolveOptions o;
  o.tol = f.tol ? *f.tol : c.number("tolerance", o.tol);
  o.order = f.order ? *f.order : c.integer("series_order", o.order);
  o.t_max = c.number("t_max", o.t_max);
  if (c.has("forced_t0")) o.forced_t0 = c.number("forced_t0");
  o.h_max = c.number("h_max", o.h_max);
  if (!(o.tol > 0.0)) throw ConfigError("tolerance must be positive");
  if (o.order < 1 || o.order > 30) throw ConfigError("series_order must be in 1..30");
  return o;
}

json solve_json(const SolveOptions& o) {
  json j{{"tolerance", o.tol}, {"series_order", o.order}, {"t_max", o.t_max}};
  if (o.forced_t0) j["forced_t0"] = *o.forced_t0;
  return j;
}

json trajectory_json(const Trajectory& tr) {
  json series = json::array();
  for (const auto& c : tr.series) series.push_back(vector_json(c));
  return json{{"t0", tr.t0},
              {"y_t0", vector_json(tr.y_t0)},
              {"series", series},
              {"accepted_steps", tr.accepted},
              {"rejected_steps", tr.rejected},
              {"evaluations", tr.evaluations},
              {"series_residual", tr.series_residual},
              {"ode_max_residual", tr.max_residual},
              {"warnings", tr.warnings}};
}

Outcome cmd_harmonic(const Reader& c, const Flags& f, bool biharmonic) {
  if (biharmonic)
    c.allow({"problem", "metric", "v", "w", "sweep", "t_end", "tolerance", "series_order", "t_max", "forced_t0",
             "h_max"});
  else
    c.allow({"problem", "metric", "v", "sweep", "t_end", "tolerance", "series_order", "t_max", "forced_t0", "h_max"});
  const MetricFamily P = build_metric(c.object("metric"));
  const double T = c.number("t_end", 1.0);
  const SolveOptions o = solve_options(c, f);
  const double w = biharmonic ? c.number("w") : 0.0;
  Outcome res;
  res.summary["solver"] = solve_json(o);

  if (c.has("sweep")) {
    if (c.has("v")) throw ConfigError("give either 'v' or 'sweep'");
    std::vector<double> vs = sweep_values(c.at("sweep"), "sweep");
    const bool single = vs.size() == 1;
    const double v_single = vs[0];
    const double dv = 1e-4 * std::max(1.0, std::abs(v_single));
    if (single) vs = {v_single - dv, v_single, v_single + dv};

    struct Row {
      double r_T, r_dot_T, max_residual;
    };
    const auto rows = run_parallel<Row>(vs.size(), [&](std::size_t i) {
      if (biharmonic) {
        const auto s = solve_biharmonic(P, vs[i], w, T, o);
        return Row{s.r.back(), s.r_dot.back(), s.max_residual};
      }
      const auto s = solve_harmonic(P, vs[i], T, o);
      return Row{s.r.back(), s.r_dot.back(), s.max_residual};
    });
    std::vector<double> rT;
    for (const auto& r : rows) rT.push_back(r.r_T);
    std::vector<double> slope = finite_differences(vs, rT);
    Csv csv({"v", "r_T", "r_dot_T", "max_residual"});
    double worst = 0.0;
    if (single) {
      csv.row({vs[1], rows[1].r_T, rows[1].r_dot_T, rows[1].max_residual});
      slope = {slope[1]};
      worst = rows[1].max_residual;
    } else {
      for (std::size_t i = 0; i < vs.size(); ++i) {
        csv.row({vs[i], rows[i].r_T, rows[i].r_dot_T, rows[i].max_residual});
        worst = std::max(worst, rows[i].max_residual);
      }
    }
    double lipschitz = 0.0;
    for (std::size_t i = 1; i < rT.size() && !single; ++i)
      lipschitz = std::max(lipschitz, std::abs((rT[i] - rT[i - 1]) / (vs[i] - vs[i - 1])));
    res.summary["sweep"] = json{{"count", single ? 1 : vs.size()},
                                {"dr_T_dv", slope},
                                {"lipschitz_estimate", single ? std::abs(slope[0]) : lipschitz},
                                {"max_residual", worst}};
    res.csv = csv.text();
    return res;
  }

  const double v = c.number("v");
  if (biharmonic) {
    const auto s = solve_biharmonic(P, v, w, T, o);
    Csv csv({"t", "r", "r_dot", "F", "F_dot", "res_def", "res_eq"});
    for (std::size_t i = 0; i < s.t.size(); ++i)
      csv.row({s.t[i], s.r[i], s.r_dot[i], s.F[i], s.F_dot[i], s.res_def[i], s.res_eq[i]});
    res.csv = csv.text();
    res.summary["result"] = json{{"r_T", s.r.back()},
                                 {"r_dot_T", s.r_dot.back()},
                                 {"F_T", s.F.back()},
                                 {"F_dot_T", s.F_dot.back()},
                                 {"r_ddot_0", s.r_ddot0},
                                 {"r_dddot_0", s.r_dddot0},
                                 {"max_residual", s.max_residual}};
    res.summary["diagnostics"] = trajectory_json(s.trajectory);
    return res;
  }
  const auto s = solve_harmonic(P, v, T, o);
  Csv csv({"t", "r", "r_dot", "residual"});
  for (std::size_t i = 0; i < s.t.size(); ++i) csv.row({s.t[i], s.r[i], s.r_dot[i], s.residual[i]});
  res.csv = csv.text();
  res.summary["result"] = json{{"r_T", s.r.back()}, {"r_dot_T", s.r_dot.back()}, {"max_residual", s.max_residual}};
  res.summary["diagnostics"] = trajectory_json(s.trajectory);
  return res;
}

Outcome cmd_singular(const Reader& c, const Flags& f, bool check_only) {
  c.allow({"problem", "singular", "regular", "y0", "t_end", "tolerance", "series_order", "t_max", "forced_t0",
           "h_max"});
  const SingularIVP p = build_singular(c, c.number("t_end", 1.0));
  const SolveOptions o = solve_options(c, f);
  Outcome res;
  res.summary["solver"] = solve_json(o);
  const AdmissibilityReport rep = check_admissibility(p, o.order);
  res.summary["admissibility"] = report_json(rep);
  if (!rep.pass) {
    res.code = kValidation;
    return res;
  }
  if (check_only) return res;
  const Trajectory tr = solve(p, o);
  std::vector<std::string> header{"t"};
  for (int i = 1; i <= p.dim(); ++i) header.push_back("y" + std::to_string(i));
  header.push_back("residual");
  Csv csv(header);
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    std::vector<double> row{tr.t[i]};
    for (Eigen::Index k = 0; k < tr.y[i].size(); ++k) row.push_back(tr.y[i](k));
    row.push_back(tr.residual[i]);
    csv.row(row);
  }
  res.csv = csv.text();
  res.summary["result"] = json{{"y_T", vector_json(tr.y.back())}, {"max_residual", tr.max_residual}};
  res.summary["diagnostics"] = trajectory_json(tr);
  return res;
}

Outcome cmd_monodromy(const Reader& c, const Flags& f) {
  c.allow({"problem", "system", "sigma", "tolerance"});
  const LinearRSSystem sys = build_system(c.object("system"));
  const double tol = f.tol ? *f.tol : c.number("tolerance", 1e-12);
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  Outcome res;
  json runs = json::array();
  for (double sigma : c.numbers("sigma")) {
    const MonodromyResult m = monodromy_at(sys, sigma, tol);
    json cp = json::array();
    for (const auto& z : m.charpoly) cp.push_back(complex_json(z));
    runs.push_back(json{{"sigma", sigma},
                        {"M", matrix_json(m.M)},
                        {"charpoly", cp},
                        {"path_steps", m.path_steps},
                        {"est_error", m.est_error}});
  }
  res.summary["monodromy"] = runs;
  res.summary["generator"] = matrix_json(monodromy_generator(sys.A0()));
  return res;
}

Outcome cmd_fundamental(const Reader& c, const Flags& f) {
  c.allow({"problem", "system", "z0", "z1", "tolerance"});
  const LinearRSSystem sys = build_system(c.object("system"));
  const double tol = f.tol ? *f.tol : c.number("tolerance", 1e-12);
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  const FundamentalResult u = fundamental_solution(sys, c.complex("z0"), c.complex("z1"), tol);
  Outcome res;
  res.summary["fundamental"] = json{{"U", matrix_json(u.U)},
                                    {"condition", u.condition},
                                    {"steps", u.steps},
                                    {"est_error", u.est_error}};
  return res;
}

json read_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot read config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return json::parse(buf.str());
}

std::filesystem::path summary_path(const std::string& out) {
  std::filesystem::path p(out);
  if (p.extension() == ".json") return p;
  return p.replace_extension(".json");
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Singular initial value problems and equivariant harmonic maps"};
  app.require_subcommand(1);
  Flags flags;
  double tol = 0.0;
  int order = 0;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"solve-harmonic", "harmonic map ODE along a normal geodesic"},
      {"solve-biharmonic", "biharmonic map ODE system"},
      {"solve-singular", "singular IVP y' = M_{-1}(y)/t + M(t, y)"},
      {"monodromy", "monodromy of a linear regular-singular system"},
      {"fundamental", "fundamental solution on the logarithmic cover"},
      {"check", "admissibility report for a singular IVP"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "JSON config file")->required();
    sub->add_option("--out", flags.out, "CSV output; the summary goes next to it as .json");
    sub->add_option("--tol", tol, "tolerance override");
    sub->add_option("--order", order, "series order override");
    sub->add_flag("--quiet", flags.quiet, "no summary on stdout");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfig;
  }
  const CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  if (sub->count("--tol")) flags.tol = tol;
  if (sub->count("--order")) flags.order = order;

  json config;
  Outcome res;
  auto emit = [&]() -> int {
    json summary{{"command", command}, {"exit_code", res.code}, {"config", config}};
    for (const auto& [k, v] : res.summary.items()) summary[k] = v;
    const std::string text = to_text(summary);
    try {
      if (!flags.out.empty()) {
        if (!res.csv.empty()) write_file(flags.out, res.csv);
        write_file(summary_path(flags.out), text);
      }
    } catch (const IOError& e) {
      err << "error: " << e.what() << "\n";
      return kIO;
    }
    if (!flags.quiet) out << text;
    return res.code;
  };

  try {
    config = read_config(flags.config);
    const Reader c(config, "config");
    static const std::map<std::string, std::string> kinds{
        {"solve-harmonic", "harmonic"}, {"solve-biharmonic", "biharmonic"}, {"solve-singular", "singular"},
        {"monodromy", "monodromy"},     {"fundamental", "fundamental"},     {"check", "check"}};
    if (c.has("problem")) {
      const json& kind = c.at("problem");
      if (!kind.is_string() || (kind.get<std::string>() != kinds.at(command) &&
                                !(command == "check" && kind.get<std::string>() == "singular")))
        throw ConfigError("config problem does not match the command " + command);
    }
    if (command == "solve-harmonic") res = cmd_harmonic(c, flags, false);
    else if (command == "solve-biharmonic") res = cmd_harmonic(c, flags, true);
    else if (command == "solve-singular") res = cmd_singular(c, flags, false);
    else if (command == "check") res = cmd_singular(c, flags, true);
    else if (command == "monodromy") res = cmd_monodromy(c, flags);
    else res = cmd_fundamental(c, flags);
    if (res.code != kOk) err << "error: validation failed\n";
    return emit();
  } catch (const IOError& e) {
    err << "error: " << e.what() << "\n";
    return kIO;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const AdmissibilityError& e) {
    err << "error: " << e.what() << "\n";
    res.code = kValidation;
    res.csv.clear();
    res.summary["admissibility"] = report_json(e.report());
    return emit();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    res.code = kValidation;
    res.summary["error"] = e.what();
    return emit();
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    res.code = kValidation;
    res.summary["error"] = e.what();
    return emit();
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << " (t = " << format_number(e.last_time()) << ")\n";
    res.code = kNumerical;
    res.summary["error"] = e.what();
    res.summary["last_time"] = e.last_time();
    return emit();
  }
}

}  // namespace rsode::cli
