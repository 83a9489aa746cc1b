#include "harness/harness.hpp"

#include "numerics/errors.hpp"
#include "numerics/parallel.hpp"
#include "numerics/quadrature.hpp"
#include "numerics/special.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace wml {

namespace {

const char* kHeader = "#maass-spectral v1";
const char* kColumns = "t_f,weighted_L4,err";

[[noreturn]] void schema_error(const std::string& name, long line, const std::string& what) {
  fail(ErrorCode::schema, name + ":" + std::to_string(line) + ": " + what);
}

double parse_field(const std::string& s, const std::string& name, long line, const char* field) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    schema_error(name, line, std::string("malformed ") + field + " '" + s + "'");
  }
  return v;
}

}  // namespace

SpectralDataset parse_spectral_data(std::istream& in, const std::string& name) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  SpectralDataset ds;
  long line_no = 0;
  bool columns_seen = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    std::string line = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    pos = end == std::string::npos ? text.size() : end + 1;
    ++line_no;
    if (line.find('\r') != std::string::npos) schema_error(name, line_no, "CR line ending");
    if (line_no == 1) {
      if (line != kHeader) schema_error(name, 1, std::string("expected header '") + kHeader + "'");
      continue;
    }
    if (line.rfind("# source:", 0) == 0) {
      std::string label = line.substr(9);
      label.erase(0, label.find_first_not_of(' '));
      ds.source_label = label;
      continue;
    }
    if (!line.empty() && line[0] == '#') continue;
    if (line == kColumns) {
      if (columns_seen || !ds.rows.empty()) schema_error(name, line_no, "column line after data");
      columns_seen = true;
      continue;
    }
    if (line.empty()) schema_error(name, line_no, "blank line");

    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (line.back() == ',') fields.push_back("");
    if (fields.size() != 3) schema_error(name, line_no, "expected 3 fields, found " + std::to_string(fields.size()));
    SpectralDatum d;
    d.t = parse_field(fields[0], name, line_no, "t_f");
    d.weighted_L4 = parse_field(fields[1], name, line_no, "weighted_L4");
    d.err = parse_field(fields[2], name, line_no, "err");
    if (d.t <= 0) schema_error(name, line_no, "t_f must be positive");
    if (d.weighted_L4 < 0) schema_error(name, line_no, "weighted_L4 must be nonnegative");
    if (d.err < 0) schema_error(name, line_no, "err must be nonnegative");
    if (!ds.rows.empty()) {
      if (d.t == ds.rows.back().t) schema_error(name, line_no, "duplicate t_f");
      if (d.t < ds.rows.back().t) schema_error(name, line_no, "t_f not increasing");
    }
    ds.rows.push_back(d);
  }
  if (line_no == 0) schema_error(name, 1, "empty file");
  ds.t_max = ds.rows.empty() ? 0 : ds.rows.back().t;
  return ds;
}

SpectralDataset load_spectral_data(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open spectral data file " + path);
  return parse_spectral_data(in, path);
}

std::string format_spectral_data(const SpectralDataset& ds) {
  std::ostringstream os;
  os << kHeader << '\n';
  if (!ds.source_label.empty()) os << "# source: " << ds.source_label << '\n';
  os << kColumns << '\n';
  char buf[64];
  for (auto& r : ds.rows) {
    const double fields[] = {r.t, r.weighted_L4, r.err};
    for (int i = 0; i < 3; ++i) {
      auto res = std::to_chars(buf, buf + sizeof buf, fields[i]);
      os.write(buf, res.ptr - buf);
      os << (i < 2 ? ',' : '\n');
    }
  }
  return os.str();
}

namespace {

// |zeta(1/2 + it)|^8 / |zeta(1 + 2it)|^2
Real zeta_weight(const Real& t) {
  Complex a = zeta(Complex(Real("0.5"), t));
  Complex b = zeta(Complex(Real(1), 2 * t));
  Real a2 = norm(a);
  return a2 * a2 * a2 * a2 / norm(b);
}

// Barycentric interpolation on the Chebyshev-Lobatto nodes of one panel.
struct LobattoPanel {
  double a = 0, b = 0;
  std::vector<double> x, f;
  double error = 0;  // size of the trailing Chebyshev coefficients

  double eval(double t) const {
    double num = 0, den = 0;
    int n = static_cast<int>(x.size()) - 1;
    for (int j = 0; j <= n; ++j) {
      double d = t - x[j];
      if (d == 0) return f[j];
      double w = (j % 2 ? -1.0 : 1.0) * (j == 0 || j == n ? 0.5 : 1.0);
      num += w * f[j] / d;
      den += w / d;
    }
    return num / den;
  }
};

std::vector<double> lobatto_nodes(double a, double b, int n) {
  std::vector<double> x(n + 1);
  for (int j = 0; j <= n; ++j) x[j] = a + (b - a) * (1 - std::cos(M_PI * j / n)) / 2;
  return x;
}

// Chebyshev coefficients from Lobatto values; the last three bound the interpolation error.
double chebyshev_tail(const std::vector<double>& f) {
  int n = static_cast<int>(f.size()) - 1;
  double tail = 0;
  for (int k = n - 2; k <= n; ++k) {
    double c = 0;
    for (int j = 0; j <= n; ++j) c += (j == 0 || j == n ? 0.5 : 1.0) * f[j] * std::cos(M_PI * j * k / n);
    c *= (k == n ? 1.0 : 2.0) / n;
    tail += std::fabs(c);
  }
  return 2 * tail;
}

struct Piecewise {
  std::vector<LobattoPanel> panels;  // sorted, covering [0, t_cap]

  double operator()(double t) const {
    auto it = std::lower_bound(panels.begin(), panels.end(), t, [](const LobattoPanel& p, double v) { return p.b < v; });
    if (it == panels.end()) --it;
    return it->eval(t);
  }
};

}  // namespace

EisensteinDetail eisenstein_term(KernelVariant v, const TestFunctionParams& p, const TransformConfig& tc, double t_cap,
                                 int degree, double panel_width) {
  p.validate();
  tc.validate();
  require(v != KernelVariant::hol, "eisenstein_term: variant must be plus or minus");
  require(degree >= 8 && degree % 2 == 0, "eisenstein_term: degree must be even and at least 8");
  require(panel_width > 0, "eisenstein_term: panel width must be positive");
  double floor_cap = p.K * std::log(double(p.K)) / p.L;
  require(t_cap >= floor_cap, "eisenstein_term: t_cap must be at least K log K / L");
  WorkingPrecision wp(tc.cfg);

  // adaptive panels: split until the Chebyshev tail is below rel 1e-8 of max |h~|
  const int tail_samples = 8;
  const double min_width = panel_width / 256;
  std::vector<std::pair<double, double>> pending;
  long npanels = std::lround(std::ceil(t_cap / panel_width));
  for (long i = 0; i < npanels; ++i) pending.emplace_back(t_cap * i / npanels, t_cap * (i + 1) / npanels);
  std::vector<double> tail_args;
  for (int j = 1; j <= tail_samples; ++j) tail_args.push_back(t_cap * (1 + double(j) / tail_samples));

  Piecewise fine;
  Real max_err, tail_sup;
  double scale = 0, tol = 0;
  std::vector<TransformValue> samples;
  long evaluations = 0;
  bool first = true;
  while (!pending.empty()) {
    std::vector<double> args;
    for (auto& [a, b] : pending) {
      auto x = lobatto_nodes(a, b, degree);
      args.insert(args.end(), x.begin(), x.end());
    }
    if (first) args.insert(args.end(), tail_args.begin(), tail_args.end());
    TransformGrid g = transform_grid(v, args, p, tc);
    evaluations += static_cast<long>(args.size());
    samples.insert(samples.end(), g.rows.begin(), g.rows.end());
    std::vector<LobattoPanel> batch;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      LobattoPanel panel;
      panel.a = pending[i].first;
      panel.b = pending[i].second;
      for (int j = 0; j <= degree; ++j) {
        const TransformValue& r = g.rows[i * (degree + 1) + j];
        panel.x.push_back(r.arg);
        panel.f.push_back(r.value.re.to_double());
        max_err = max(max_err, r.error + abs(r.value.im));
        scale = std::max(scale, std::fabs(panel.f.back()));
      }
      panel.error = chebyshev_tail(panel.f);
      batch.push_back(std::move(panel));
    }
    if (first) {
      for (std::size_t j = pending.size() * (degree + 1); j < args.size(); ++j) {
        tail_sup = max(tail_sup, abs(g.rows[j].value) + g.rows[j].error);
      }
      tol = std::max(1e-8 * scale, tc.cfg.tail_threshold);
      first = false;
    }
    pending.clear();
    for (auto& panel : batch) {
      double w = panel.b - panel.a;
      if (panel.error > tol && w > min_width) {
        pending.emplace_back(panel.a, panel.a + w / 2);
        pending.emplace_back(panel.a + w / 2, panel.b);
      } else {
        fine.panels.push_back(std::move(panel));
      }
    }
  }
  std::sort(fine.panels.begin(), fine.panels.end(), [](auto& x, auto& y) { return x.a < y.a; });
  double interp = 0;
  for (auto& panel : fine.panels) interp = std::max(interp, panel.error);

  QuadOptions opt;
  opt.order = 24;
  // the interpolant is only continuous across panel edges
  for (auto& panel : fine.panels) opt.breakpoints.push_back(panel.b);
  opt.breakpoints.pop_back();
  MultiLineFunction body = [&](const Real& t, std::vector<Complex>& out) {
    Real w = zeta_weight(t);
    out[0] = Complex(w * fine(t.to_double()));
    out[1] = Complex(w);
  };
  MultiQuadResult q = quad_line_multi(body, 2, Real(0), Real(t_cap), tc.cfg, opt);
  QuadOptions topt;
  topt.order = 24;
  for (double b = t_cap + 1; b < 2 * t_cap; b += 1) topt.breakpoints.push_back(b);
  LineFunction weight_only = [&](const Real& t) { return Complex(zeta_weight(t)); };
  QuadResult tq = quad_line(weight_only, Real(t_cap), Real(2 * t_cap), tc.cfg, topt);

  Real inv_pi = 1 / pi();
  Real mass = q.value[1].re;
  double lebesgue = 2 / M_PI * std::log(degree + 1.0) + 1;

  EisensteinDetail d;
  d.t_cap = t_cap;
  d.nodes = static_cast<int>(evaluations);
  d.interpolation_error = Real(interp);
  d.samples = std::move(samples);
  d.tail = tail_sup * (tq.value.re + tq.error) * inv_pi;
  d.term.value = q.value[0].re * inv_pi;
  d.term.budget = (Real(interp) + max_err * lebesgue) * mass * inv_pi + (q.error[0] + abs(q.value[0].im)) * inv_pi + d.tail;
  if (Real(interp) * mass * inv_pi > 0.01 * max(abs(d.term.value), Real(tc.cfg.tail_threshold))) {
    std::ostringstream os;
    os << "eisenstein_term: interpolation grid too coarse (estimate " << interp << " at degree " << degree
       << " and panel width " << min_width << "); raise the degree";
    fail(ErrorCode::convergence, os.str());
  }
  return d;
}

TermValue maass_term(const SpectralDataset& ds, const TransformGrid& plus, const TransformGrid& minus) {
  require(plus.rows.size() == ds.rows.size() && minus.rows.size() == ds.rows.size(),
          "maass_term: transform grids do not match the dataset");
  TermValue t;
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    const SpectralDatum& d = ds.rows[i];
    const TransformValue& hp = plus.rows[i];
    const TransformValue& hm = minus.rows[i];
    t.value += hp.value.re * d.weighted_L4;
    t.budget += abs(hp.value) * d.err + (hp.error + abs(hp.value.im)) * (d.weighted_L4 + d.err);
    t.budget += (abs(hm.value) + hm.error) * (d.weighted_L4 + d.err);
  }
  return t;
}

TermValue maass_term(const TestFunctionParams& p, const SpectralDataset& ds, const TransformConfig& tc) {
  WorkingPrecision wp(tc.cfg);
  std::vector<double> ts;
  for (auto& r : ds.rows) ts.push_back(r.t);
  if (ts.empty()) return {};
  return maass_term(ds, transform_grid(KernelVariant::plus, ts, p, tc), transform_grid(KernelVariant::minus, ts, p, tc));
}

double report_residual(double lhs, double maass, double eisenstein, double dual, double main) {
  return lhs - (maass + eisenstein + dual + main);
}

namespace {

PrecisionConfig moment_precision(const PrecisionConfig& cfg) { return PrecisionConfig::with_digits(cfg.digits); }

double fitted_moment_bound(double k) { return 10 * std::pow(k, 4.0 / 3) * std::pow(std::log(k), 20.0 / 3); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

ReciprocityReport reciprocity_report(const TestFunctionParams& p, const SpectralDataset& ds, const TransformConfig& tc,
                                     const ReportOptions& opt, ReportCache* cache) {
  p.validate();
  tc.validate();
  require(p.K <= 40 && p.L == 2, "reciprocity_report: requires K <= 40 and L = 2");
  require(opt.k_cap >= 12 && opt.k_cap <= 200, "reciprocity_report: k_cap must lie in [12, 200]");
  require(opt.tail_mass >= 0, "reciprocity_report: tail_mass must be nonnegative");
  WorkingPrecision wp(tc.cfg);
  double t_cap = opt.t_cap > 0 ? opt.t_cap : 2 * p.K * std::log(double(p.K)) / p.L;

  ReportCache local;
  if (!cache) cache = &local;
  long k_need = std::max(opt.k_cap, p.K + p.L2());
  if (!cache->moments || cache->moments->rows.empty() || cache->moments->rows.front().k > 12 ||
      cache->moments->rows.back().k < k_need) {
    cache->moments = moment_table(12, k_need, moment_precision(tc.cfg), opt.jobs);
  }
  const MomentTable& table = *cache->moments;
  auto m4 = [&](long k) {
    const MomentRow* r = table.find(k);
    return r ? r->m4 : Real(0);
  };

  std::vector<long> dual_k, tail_k;
  for (long k = 12; k <= 2 * opt.k_cap; k += 4) {
    if (dim_cusp_forms(k) == 0) continue;
    (k <= opt.k_cap ? dual_k : tail_k).push_back(k);
  }
  std::vector<double> maass_t;
  for (auto& r : ds.rows) maass_t.push_back(r.t);

  // independent terms; each task fills its own slot
  EisensteinDetail eis_plus, eis_minus;
  TransformGrid maass_plus, maass_minus, hol;
  bool need_main = !cache->main_term.has_value();
  MainTermResult main;
  std::vector<std::function<void()>> tasks = {
      [&] { eis_plus = eisenstein_term(KernelVariant::plus, p, tc, t_cap, opt.chebyshev_degree, opt.panel_width); },
      [&] { eis_minus = eisenstein_term(KernelVariant::minus, p, tc, t_cap, opt.chebyshev_degree, opt.panel_width); },
      [&] {
        if (!maass_t.empty()) maass_plus = transform_grid(KernelVariant::plus, maass_t, p, tc);
      },
      [&] {
        if (!maass_t.empty()) maass_minus = transform_grid(KernelVariant::minus, maass_t, p, tc);
      },
      [&] {
        std::vector<double> ks(dual_k.begin(), dual_k.end());
        ks.insert(ks.end(), tail_k.begin(), tail_k.end());
        hol = transform_grid(KernelVariant::hol, ks, p, tc);
      },
      [&] {
        if (need_main) main = main_term_limit(p, opt.main_radius, opt.main_nodes, tc, 1, true);
      },
  };
  auto run = [&](const char* term, std::function<void()>& f) {
    try {
      f();
    } catch (const Error& e) {
      fail(e.code(), std::string(term) + ": " + e.what());
    }
  };
  const char* names[] = {"rhs_eisenstein_plus", "rhs_eisenstein_plus (minus channel)", "rhs_maass_plus",
                         "rhs_maass_plus (minus channel)", "rhs_holomorphic_dual", "rhs_main_term"};
  parallel_map(tasks.size(), opt.jobs, [&](std::size_t i) {
    run(names[i], tasks[i]);
    return 0;
  });
  if (need_main) cache->main_term = main;
  const MainTermResult& mt = *cache->main_term;

  ReciprocityReport rep;
  rep.K = p.K;
  rep.L = p.L;
  rep.digits = tc.cfg.digits;
  rep.t_cap = t_cap;
  rep.k_cap = opt.k_cap;
  rep.source_label = ds.source_label;
  rep.spectral_rows = ds.rows.size();
  double m4_rel = 4 * tc.cfg.quad_rel_tol + std::pow(10.0, -tc.cfg.digits / 2.0);

  // left side: sum over the support of M(k) h_hol(k)
  Real lhs, lhs_budget;
  for (long k = std::max(12L, p.K - p.L2()); k <= p.K + p.L2(); k += 2) {
    Real term = m4(k) * h_hol(k, p).re;
    lhs += term;
    lhs_budget += abs(term) * m4_rel;
  }
  rep.lhs_holomorphic = lhs.to_double();
  rep.budgets.lhs_holomorphic = lhs_budget.to_double();

  TermValue maass = maass_term(ds, maass_plus, maass_minus);
  rep.rhs_maass_plus = maass.value.to_double();
  rep.budgets.rhs_maass_plus = maass.budget.to_double();

  rep.rhs_eisenstein_plus = eis_plus.term.value.to_double();
  rep.budgets.rhs_eisenstein_plus =
      (eis_plus.term.budget + abs(eis_minus.term.value) + eis_minus.term.budget).to_double();

  Real dual, dual_budget;
  for (std::size_t i = 0; i < dual_k.size(); ++i) {
    const TransformValue& h = hol.rows[i];
    Real m = m4(dual_k[i]);
    dual += m * h.value.re;
    dual_budget += m * (h.error + abs(h.value.im)) + m * abs(h.value) * m4_rel;
  }
  for (std::size_t i = 0; i < tail_k.size(); ++i) {
    const TransformValue& h = hol.rows[dual_k.size() + i];
    dual_budget += (abs(h.value) + h.error) * fitted_moment_bound(double(tail_k[i]));
  }
  rep.rhs_holomorphic_dual = dual.to_double();
  rep.budgets.rhs_holomorphic_dual = dual_budget.to_double();

  rep.rhs_main_term = mt.value.re.to_double();
  rep.budgets.rhs_main_term = (mt.quad_error + abs(mt.value.im)).to_double() + mt.stability;

  // sup of |h+| above t_max on the Eisenstein sample grid
  Real sup;
  for (auto& r : eis_plus.samples) {
    if (r.arg >= ds.t_max) sup = max(sup, abs(r.value) + r.error);
  }
  rep.budgets.maass_tail_budget = (sup * opt.tail_mass).to_double();

  rep.residual = report_residual(rep.lhs_holomorphic, rep.rhs_maass_plus, rep.rhs_eisenstein_plus,
                                 rep.rhs_holomorphic_dual, rep.rhs_main_term);

  rep.assumptions = {
      "spectral data: " + (ds.source_label.empty() ? std::string("unlabeled") : ds.source_label),
      "weighted L^4 mass of Maass forms with t_f > " + fmt(ds.t_max) + " is at most " + fmt(opt.tail_mass) +
          " (declared, not derived)",
      "minus-channel Maass and Eisenstein terms are evaluated and carried in the plus-term budgets",
      "h+ beyond 2 t_cap = " + fmt(2 * t_cap) + " is not budgeted; its sampled maximum on [t_cap, 2 t_cap] enters the Eisenstein budget",
      "dual weights in (k_cap, 2 k_cap] are bounded by M(k) <= 10 k^(4/3) (log k)^(20/3); weights above 2 k_cap = " +
          std::to_string(2 * opt.k_cap) + " are not budgeted",
      "main term budget = quadrature estimate + |Im| + disagreement between radius " + fmt(mt.radius) + " and half of it",
  };
  return rep;
}

std::string ReciprocityReport::to_json() const {
  nlohmann::ordered_json j;
  j["lhs_holomorphic"] = lhs_holomorphic;
  j["rhs_maass_plus"] = rhs_maass_plus;
  j["rhs_eisenstein_plus"] = rhs_eisenstein_plus;
  j["rhs_holomorphic_dual"] = rhs_holomorphic_dual;
  j["rhs_main_term"] = rhs_main_term;
  nlohmann::ordered_json b;
  b["lhs_holomorphic"] = budgets.lhs_holomorphic;
  b["rhs_maass_plus"] = budgets.rhs_maass_plus;
  b["rhs_eisenstein_plus"] = budgets.rhs_eisenstein_plus;
  b["rhs_holomorphic_dual"] = budgets.rhs_holomorphic_dual;
  b["rhs_main_term"] = budgets.rhs_main_term;
  b["maass_tail_budget"] = budgets.maass_tail_budget;
  j["budgets"] = b;
  j["residual"] = residual;
  j["assumptions"] = assumptions;
  nlohmann::ordered_json par;
  par["K"] = K;
  par["L"] = L;
  par["digits"] = digits;
  par["t_cap"] = t_cap;
  par["k_cap"] = k_cap;
  par["spectral_rows"] = spectral_rows;
  j["parameters"] = par;
  return j.dump(2) + "\n";
}

DyadicStats dyadic_stats(const MomentTable& table, long T, double V) {
  require(T >= 12, "dyadic_stats: T must be at least 12");
  require(V >= 0, "dyadic_stats: V must be nonnegative");
  std::string missing;
  for (long k = T + (T % 2); k <= 2 * T; k += 2) {
    if (dim_cusp_forms(k) > 0 && !table.find(k)) missing += (missing.empty() ? "" : ", ") + std::to_string(k);
  }
  if (!missing.empty()) fail(ErrorCode::domain, "dyadic_stats: table lacks weights " + missing);
  DyadicStats s;
  s.T = T;
  s.V = V;
  for (auto& r : table.rows) {
    if (r.k < T || r.k > 2 * T) continue;
    double m = r.m4.to_double();
    if (m < V) continue;
    Real sq = r.m4 * r.m4;
    s.S += sq;
    if (m <= 2 * V) s.S_star += sq;
  }
  return s;
}

int density_range(long T, double V) {
  require(T >= 2 && V >= 0, "density_range: need T >= 2 and V >= 0");
  double t = double(T);
  if (V <= std::pow(t, 2 * selberg_theta)) return 1;
  if (V <= std::pow(t, 2 * (1 - selberg_theta) / 7)) return 2;
  if (V <= std::cbrt(t) * std::pow(std::log(t), 13.0 / 6)) return 3;
  return 4;
}

}  // namespace wml
