#include "capi/checks.hpp"

#include "harness/harness.hpp"
#include "hecke/hecke.hpp"
#include "testfn/testfn.hpp"

#include <json.hpp>

#include <cmath>
#include <functional>
#include <sstream>

namespace wml::checks {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

TransformConfig small_config() {
  TransformConfig tc;
  tc.cfg = PrecisionConfig::with_digits(30);
  tc.cfg.tail_threshold = 1e-32;
  tc.order = 24;
  return tc;
}

TestFunctionParams make(long K, long L) {
  TestFunctionParams p;
  p.K = K;
  p.L = L;
  return p;
}

using Suite = std::function<void(const Settings&, std::vector<Result>&)>;

void add(std::vector<Result>& out, std::string name, bool pass, std::string detail = {}) {
  out.push_back({std::move(name), pass, std::move(detail)});
}

void testfn_suite(const Settings& s, std::vector<Result>& out) {
  const TestFunctionParams& p = s.params;
  WorkingPrecision wp(s.tc.cfg);
  bool nonneg = true, agree = true, zeros = true;
  double worst = 0;
  for (long k = std::max(2L, p.K - p.L2()); k <= p.K + p.L2(); k += 2) {
    Real w = h_hol_weight(k, p);
    nonneg = nonneg && w.sign() >= 0;
    mpq_class q = h_hol_product(k, p);
    Real b;
    mpfr_set_q(b.get(), q.get_mpq_t(), MPFR_RNDN);
    if (!b.is_zero()) worst = std::max(worst, (abs(w - b) / abs(b)).to_double());
  }
  agree = worst < std::pow(10.0, -(s.tc.cfg.digits - 5));
  for (long d : {2L, 4L, 10L}) {
    zeros = zeros && h_hol_weight(p.K + p.L2() + d, p).is_zero();
    if (p.K - p.L2() - d >= 2) zeros = zeros && h_hol_weight(p.K - p.L2() - d, p).is_zero();
  }
  add(out, "testfn.nonnegative_on_support", nonneg);
  add(out, "testfn.center_is_one", h_hol_weight(p.K, p) == Real(1));
  add(out, "testfn.zero_outside_support", zeros);
  add(out, "testfn.product_form_agrees", agree, "max rel diff " + fmt(worst));
}

void transform_suite(const Settings&, std::vector<Result>& out) {
  TestFunctionParams p = make(64, 4);
  TransformConfig tc = small_config();
  WorkingPrecision wp(tc.cfg);
  TransformValue a = transform_eval(KernelVariant::plus, 12.0, p, tc);
  TransformValue b = transform_eval(KernelVariant::plus, -12.0, p, tc);
  add(out, "transform.even_in_t", abs(a.value - b.value) <= a.error + b.error);

  TransformConfig unfolded = tc;
  unfolded.fold = false;
  TransformValue u = transform_eval(KernelVariant::plus, 12.0, p, unfolded);
  add(out, "transform.real_valued", abs(u.value.im) <= u.error, "|im| " + fmt(abs(u.value.im).to_double()));

  TransformConfig s3 = tc, s7 = tc;
  s3.sigma = 0.3;
  s7.sigma = 0.7;
  TransformValue x = transform_eval(KernelVariant::plus, 12.0, p, s3);
  TransformValue y = transform_eval(KernelVariant::plus, 12.0, p, s7);
  add(out, "transform.sigma_independent", abs(x.value - y.value) <= x.error + y.error,
      "diff " + fmt(abs(x.value - y.value).to_double()));
}

void stationary_suite(const Settings&, std::vector<Result>& out) {
  bool ok = true;
  for (double K : {512.0, 2048.0}) {
    for (double e : {0.7, 0.75}) {
      double t = std::pow(K, e);
      double y = stationary_root(t, K);
      ok = ok && y > 0 && std::fabs(K * K * y * (y + 4 * t) - std::pow(2 * t + y, 4)) <= 1e-9 * std::pow(2 * t + y, 4);
    }
  }
  add(out, "stationary.root_equation", ok);
  StationaryPointResult r = locate_stationary_point(std::pow(2048.0, 0.75), make(2048, 8), small_config());
  add(out, "stationary.location_K2048", r.rel_deviation < 0.25 && r.y_located >= r.window_lo && r.y_located <= r.window_hi,
      "deviation " + fmt(r.rel_deviation));
}

void oscillation_suite(const Settings& s, std::vector<Result>& out) {
  TransformConfig tc = small_config();
  tc.cfg.tail_threshold = 1e-20;
  WorkingPrecision wp(tc.cfg);
  OscillationResult ab = oscillation_sum(24, 30, 64, 2, tc, s.jobs);
  OscillationResult ba = oscillation_sum(30, 24, 64, 2, tc, s.jobs);
  add(out, "oscillation.hermitian", abs(ab.value - conj(ba.value)) <= ab.budget + ba.budget);
  OscillationResult d = oscillation_sum(24, 24, 64, 2, tc, s.jobs);
  add(out, "oscillation.diagonal_nonnegative", d.value.re.sign() >= 0 && abs(d.value.im) <= d.budget);
}

void mainterm_suite(const Settings&, std::vector<Result>& out) {
  TestFunctionParams p = make(32, 2);
  TransformConfig tc = small_config();
  tc.cfg.quad_rel_tol = 1e-20;
  tc.cfg.tail_threshold = 1e-28;
  WorkingPrecision wp(tc.cfg);
  Complex z = polar(Real("0.01"), Real("0.7"));
  Complex a = main_term_at(z, p, tc);
  Complex b = main_term_at(conj(z), p, tc);
  Complex c = main_term_at(z, p, tc, nullptr, 1.6);
  double scale = abs(a).to_double();
  add(out, "mainterm.conjugate_symmetry", abs(b - conj(a)).to_double() <= 1e-15 * scale);
  add(out, "mainterm.contour_independent", abs(c - a).to_double() <= 1e-15 * scale);
}

const MomentTable& small_table(const Settings&) {
  static const MomentTable table = [] {
    PrecisionConfig cfg = PrecisionConfig::with_digits(30);
    WorkingPrecision wp(cfg);
    return moment_table(12, 30, cfg);
  }();
  return table;
}

void moments_suite(const Settings& s, std::vector<Result>& out) {
  const MomentTable& t = small_table(s);
  PrecisionConfig cfg = PrecisionConfig::with_digits(30);
  WorkingPrecision wp(cfg);
  bool vanish = true, nonneg = true, dims = true;
  for (const MomentRow& r : t.rows) {
    dims = dims && r.dim == dim_cusp_forms(r.k) && long(r.central.size()) == r.dim;
    for (std::size_t i = 0; i < r.central.size(); ++i) {
      if (r.k % 4 == 2) vanish = vanish && r.central[i].is_zero();
      else nonneg = nonneg && r.central[i].sign() >= 0;
      nonneg = nonneg && r.adjoint[i].sign() > 0;
    }
  }
  add(out, "moments.dimensions", dims);
  add(out, "moments.vanish_k_2_mod_4", vanish);
  add(out, "moments.nonnegative", nonneg);
  double defect = 0;
  for (long k : {24L, 28L}) {
    for (const HeckeForm& f : eigenforms(k, default_length(k), cfg)) defect = std::max(defect, f.hecke_defect);
  }
  add(out, "moments.hecke_relations", defect < 1e-20, "defect " + fmt(defect));
}

void reciprocity_suite(const Settings&, std::vector<Result>& out) {
  std::string text = "#maass-spectral v1\n# source: check\nt_f,weighted_L4,err\n9.5,0.25,0.01\n12.25,1.5,0.125\n";
  std::istringstream in(text);
  SpectralDataset ds = parse_spectral_data(in, "check");
  add(out, "reciprocity.csv_round_trip", format_spectral_data(ds) == text && ds.t_max == 12.25);

  bool schema = true;
  for (const char* bad : {"t_f,weighted_L4,err\n1,1,1\n", "#maass-spectral v1\n2,1,1\n1,1,1\n",
                          "#maass-spectral v1\n1,x,1\n", "#maass-spectral v1\n1,1\n"}) {
    std::istringstream b(bad);
    try {
      parse_spectral_data(b, "bad");
      schema = false;
    } catch (const Error& e) {
      schema = schema && e.code() == ErrorCode::schema;
    }
  }
  add(out, "reciprocity.schema_errors", schema);

  ReciprocityReport r;
  r.lhs_holomorphic = 1.25;
  r.rhs_maass_plus = 0.1;
  r.rhs_eisenstein_plus = 0.7;
  r.rhs_holomorphic_dual = 1e-9;
  r.rhs_main_term = 0.3;
  r.residual = report_residual(r.lhs_holomorphic, r.rhs_maass_plus, r.rhs_eisenstein_plus, r.rhs_holomorphic_dual,
                               r.rhs_main_term);
  nlohmann::json j = nlohmann::json::parse(r.to_json());
  double again = report_residual(j["lhs_holomorphic"], j["rhs_maass_plus"], j["rhs_eisenstein_plus"],
                                 j["rhs_holomorphic_dual"], j["rhs_main_term"]);
  add(out, "reciprocity.residual_algebra", again == j["residual"].get<double>());

  // duplicating every row at half weight leaves the Maass term unchanged
  WorkingPrecision wp(PrecisionConfig::with_digits(30));
  TransformGrid plus, minus;
  minus.variant = KernelVariant::minus;
  SpectralDataset half;
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    TransformValue v;
    v.arg = ds.rows[i].t;
    v.value = Complex(Real(1.0 / (i + 2)));
    v.error = Real(1e-20);
    plus.rows.push_back(v);
    minus.rows.push_back(v);
  }
  TransformGrid plus2, minus2;
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    SpectralDatum d = ds.rows[i];
    d.weighted_L4 /= 2;
    d.err /= 2;
    for (int c = 0; c < 2; ++c) {
      half.rows.push_back(d);
      plus2.rows.push_back(plus.rows[i]);
      minus2.rows.push_back(minus.rows[i]);
    }
  }
  TermValue a = maass_term(ds, plus, minus);
  TermValue b = maass_term(half, plus2, minus2);
  add(out, "reciprocity.maass_linearity", abs(a.value - b.value).to_double() <= 1e-12 * abs(a.value).to_double());
}

void stats_suite(const Settings& s, std::vector<Result>& out) {
  const MomentTable& t = small_table(s);
  WorkingPrecision wp(PrecisionConfig::with_digits(30));
  bool mono = true, star = true;
  long prev_count = -1;
  Real prev_S(-1);
  for (double V : {8.0, 4.0, 2.0, 1.0, 0.5, 0.25, 1e-6}) {
    DyadicStats d = dyadic_stats(t, 12, V);
    long c = density_count(t, 12, V);
    mono = mono && c >= prev_count && d.S >= prev_S;
    star = star && d.S_star <= d.S;
    prev_count = c;
    prev_S = d.S;
  }
  add(out, "stats.monotone_in_V", mono);
  add(out, "stats.window_sum_bounded", star);
}

const std::vector<std::pair<std::string, Suite>>& suites() {
  static const std::vector<std::pair<std::string, Suite>> all = {
      {"testfn", testfn_suite},           {"transform", transform_suite}, {"stationary", stationary_suite},
      {"oscillation", oscillation_suite}, {"mainterm", mainterm_suite},   {"moments", moments_suite},
      {"reciprocity", reciprocity_suite}, {"stats", stats_suite},
  };
  return all;
}

}  // namespace

const std::vector<std::string>& modules() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (auto& s : suites()) n.push_back(s.first);
    return n;
  }();
  return names;
}

std::vector<Result> run(const std::string& module, const Settings& s) {
  std::vector<Result> out;
  bool found = false;
  for (auto& [name, suite] : suites()) {
    if (module != "all" && module != name) continue;
    found = true;
    try {
      suite(s, out);
    } catch (const Error& e) {
      add(out, name, false, e.what());
    }
  }
  require(found, "unknown check module '" + module + "'");
  return out;
}

}  // namespace wml::checks
