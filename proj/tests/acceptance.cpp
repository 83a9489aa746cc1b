// Acceptance suite: `acceptance --criterion N` prints one PASS/FAIL line for criterion N.

#include "harness/harness.hpp"
#include "hecke/hecke.hpp"
#include "kernels/kernels.hpp"
#include "numerics/errors.hpp"
#include "numerics/parallel.hpp"
#include "testfn/testfn.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace wml;

namespace {

// Collects named sub-checks; the criterion passes when all of them do.
class Outcome {
public:
  void check(bool ok, const std::string& what) {
    if (!ok) failed_.push_back(what);
    notes_.push_back(what);
  }
  void note(const std::string& what) { notes_.push_back(what); }
  bool pass() const { return failed_.empty(); }
  std::string summary() const {
    const std::vector<std::string>& v = pass() ? notes_ : failed_;
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "; " : "") + v[i];
    return s;
  }

private:
  std::vector<std::string> notes_, failed_;
};

std::string g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

TestFunctionParams params(long K, long L) {
  TestFunctionParams p;
  p.K = K;
  p.L = L;
  return p;
}

TransformConfig config30(double tol = 0, double tail = 0) {
  TransformConfig tc;
  tc.cfg = PrecisionConfig::with_digits(30);
  if (tol > 0) tc.cfg.quad_rel_tol = tol;
  if (tail > 0) tc.cfg.tail_threshold = tail;
  tc.order = 24;
  return tc;
}

Real from_rational(const mpq_class& q) {
  Real r;
  mpfr_set_q(r.get(), q.get_mpq_t(), MPFR_RNDN);
  return r;
}

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

// q prod (1 - q^n)^24 up to q^N.
std::vector<mpz_class> discriminant_product(long N) {
  std::vector<mpz_class> a(N + 1);
  a[1] = 1;
  for (long n = 1; n < N; ++n) {
    for (int rep = 0; rep < 24; ++rep) {
      for (long j = N; j >= n + 1; --j) a[j] -= a[j - n];
    }
  }
  return a;
}

// L(1/2, Delta) = 2 (2 pi)^6 / 5! int_1^inf Delta(iy) y^5 dy by composite Simpson in long double.
long double theta_integral_weight12() {
  auto tau = discriminant_product(60);
  const long double two_pi = 2 * 3.14159265358979323846264338327950288L;
  auto f = [&](long double y) {
    long double s = 0;
    for (long n = 1; n <= 60; ++n) s += tau[n].get_d() * std::exp(-two_pi * n * y);
    return s * std::pow(y, 5.0L);
  };
  const long double a = 1, b = 14;
  const long steps = 20000;
  long double h = (b - a) / steps, s = f(a) + f(b);
  for (long i = 1; i < steps; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return 2 * std::pow(two_pi, 6.0L) / 120 * (s * h / 3);
}

Outcome dual_path() {
  Outcome o;
  PrecisionConfig cfg = PrecisionConfig::with_digits(50);
  WorkingPrecision wp(cfg);
  double worst = 0;
  for (long K = 8; K <= 64; K += 4) {
    TestFunctionParams p = params(K, 2);
    for (long k = K - 4; k <= K + 4; k += 2) {
      Real exact = from_rational(h_hol_product(k, p));
      worst = std::max(worst, (abs(h_hol_weight(k, p) - exact) / exact).to_double());
    }
  }
  o.check(worst <= 1e-25, "max rel diff " + g(worst) + " <= 1e-25");
  return o;
}

Outcome normalization() {
  Outcome o;
  PrecisionConfig cfg = PrecisionConfig::with_digits(50);
  WorkingPrecision wp(cfg);
  double center = 0;
  bool zeros = true;
  for (long K = 8; K <= 64; K += 4) {
    for (long L : {2L, 4L}) {
      TestFunctionParams p = params(K, L);
      if (p.L2() >= K - 1) continue;
      Complex v = h_hol(K, p);
      Real signed_one = (K % 4 == 0) ? Real(1) : Real(-1);
      center = std::max(center, (abs(v.re - signed_one) + abs(v.im)).to_double());
      for (long k = 2; k <= K + p.L2() + 40; k += 2) {
        if (k >= K - p.L2() && k <= K + p.L2()) continue;
        Complex z = h_hol(k, p);
        zeros = zeros && z.re.is_zero() && z.im.is_zero();
      }
    }
  }
  o.check(center <= 1e-30, "center deviation " + g(center));
  o.check(zeros, "exact zeros outside the support");
  for (long K : {256L, 1024L}) {
    for (long L : {4L, 8L}) {
      double c = gaussian_decay_constant(params(K, L));
      o.check(c <= 10, "decay constant K=" + std::to_string(K) + " L=" + std::to_string(L) + " " + g(c));
    }
  }
  return o;
}

Outcome bessel_oracle() {
  Outcome o;
  PrecisionConfig cfg = PrecisionConfig::with_digits(30);
  cfg.quad_rel_tol = 1e-16;
  WorkingPrecision wp(cfg);
  TestFunctionParams p = params(12, 2);
  double worst = 0;
  for (long k : {8L, 10L, 12L, 14L, 16L}) {
    worst = std::max(worst, std::fabs(bessel_transform_oracle(k, p, cfg).to_double() - h_hol_weight(k, p).to_double()));
  }
  o.check(worst <= 1e-8, "max abs diff " + g(worst) + " <= 1e-8");
  return o;
}

Outcome mellin() {
  Outcome o;
  PrecisionConfig cfg = PrecisionConfig::with_digits(30);
  cfg.quad_rel_tol = 1e-16;
  WorkingPrecision wp(cfg);
  TestFunctionParams p = params(12, 2);
  double worst = 0;
  for (const Complex& s : {Complex(1), Complex(0.5), Complex(0.5, 3.0)}) {
    Complex a = mellin_oracle(s, p, cfg), b = H_hat(s, p);
    worst = std::max(worst, (abs(a - b) / abs(b)).to_double());
  }
  o.check(worst <= 1e-5, "max rel diff " + g(worst) + " <= 1e-5");
  return o;
}

Outcome regime() {
  Outcome o;
  WorkingPrecision wp(PrecisionConfig::with_digits(50));
  TestFunctionParams p = params(256, 4);
  std::vector<double> tau;
  for (int i = 0; i <= 64; ++i) tau.push_back(2.0 * 256 * i / 64);
  for (double sigma : {-2.0, 0.5}) {
    RegimeBoundReport r = regime_bound_report(p, sigma, tau);
    double worst = 0;
    for (auto& row : r.grid) worst = std::max(worst, row.ratio.to_double());
    std::string tag = "sigma=" + g(sigma) + " ";
    o.check(worst <= 100, tag + "max ratio " + g(worst));
    double rel = r.fitted_gaussian_rate / r.predicted_gaussian_rate;
    o.check(std::fabs(rel - 1) <= 0.3, tag + "fitted/predicted Gaussian rate " + g(rel));
  }
  return o;
}

Outcome transforms() {
  Outcome o;
  TestFunctionParams p = params(512, 8);
  TransformConfig tc = config30();
  WorkingPrecision wp(tc.cfg);

  for (KernelVariant v : {KernelVariant::plus, KernelVariant::minus}) {
    std::string name = variant_name(v);
    TransformValue a = transform_eval(v, 40.0, p, tc);
    TransformValue b = transform_eval(v, -40.0, p, tc);
    o.check(abs(a.value - b.value) <= a.error + b.error, name + " even");
    TransformConfig unfolded = tc;
    unfolded.fold = false;
    TransformValue u = transform_eval(v, 40.0, p, unfolded);
    o.check(abs(u.value.im) <= u.error, name + " real");
  }
  TransformConfig s3 = tc, s7 = tc;
  s3.sigma = 0.3;
  s7.sigma = 0.7;
  TransformValue x = transform_eval(KernelVariant::plus, 40.0, p, s3);
  TransformValue y = transform_eval(KernelVariant::plus, 40.0, p, s7);
  o.check(abs(x.value - y.value) <= x.error + y.error, "sigma 0.3 vs 0.7");

  TransformGrid minus = transform_grid(KernelVariant::minus, {10, 40, 64}, p, tc);
  double worst_minus = 0;
  for (auto& r : minus.rows) worst_minus = std::max(worst_minus, abs(r.value).to_double());
  o.check(worst_minus <= 1e-20, "max |h-| " + g(worst_minus) + " <= 1e-20");

  TransformGrid hol = transform_grid(KernelVariant::hol, {4, 12, 20, 32}, p, tc);
  double worst_hol = 0;
  for (auto& r : hol.rows) worst_hol = std::max(worst_hol, abs(r.value).to_double());
  o.check(worst_hol <= 1e-20, "max |h_hol(k)| for k <= K/2L " + g(worst_hol) + " <= 1e-20");

  double lo = std::pow(512.0, 0.72), hi = 512.0 / 8;
  std::vector<double> ts;
  for (int i = 0; i < 8; ++i) ts.push_back(lo * std::pow(hi / lo, i / 7.0));
  double far = 2 * 512 * std::log(512.0) / 8;
  ts.push_back(far);
  TransformGrid plus = transform_grid(KernelVariant::plus, ts, p, tc);
  double smin = 1e300, smax = 0;
  for (std::size_t i = 0; i + 1 < plus.rows.size(); ++i) {
    double s = abs(plus.rows[i].value).to_double() * std::sqrt(ts[i]) / 8;
    smin = std::min(smin, s);
    smax = std::max(smax, s);
  }
  o.check(smin >= 1e-3 && smax <= 1e3, "|h+| sqrt(t)/L in [" + g(smin) + ", " + g(smax) + "]");
  double at_far = abs(plus.rows.back().value).to_double();
  o.check(at_far <= 1e-15, "|h+(2K log K/L)| " + g(at_far) + " <= 1e-15");
  return o;
}

Outcome stationary() {
  Outcome o;
  TestFunctionParams p = params(2048, 8);
  TransformConfig tc = config30();
  for (double e : {0.75, 0.80}) {
    double t = std::pow(2048.0, e);
    try {
      StationaryPointResult r = locate_stationary_point(t, p, tc);
      o.check(r.rel_deviation <= 0.25, "t=K^" + g(e) + " deviation " + g(r.rel_deviation));
    } catch (const Error& err) {
      o.check(false, "t=K^" + g(e) + ": " + err.what());
    }
  }
  double t = std::pow(2048.0, 0.72);
  double ratio = stationary_root(t, 2048) / (4 * t * t * t / (2048.0 * 2048.0));
  o.check(std::fabs(ratio - 1) <= 0.05, "root / (4t^3/K^2) at K^0.72 " + g(ratio));
  return o;
}

Outcome oscillation() {
  Outcome o;
  TransformConfig tc = config30();
  WorkingPrecision wp(tc.cfg);
  const long T = 256;
  double t1 = std::pow(double(T), 0.75), t2 = t1 + 10;
  int jobs = default_jobs();
  OscillationResult diag = oscillation_sum(t1, t1, T, 4, tc, jobs);
  OscillationResult off = oscillation_sum(t1, t2, T, 4, tc, jobs);
  OscillationResult back = oscillation_sum(t2, t1, T, 4, tc, jobs);
  double d = abs(diag.value).to_double(), f = abs(off.value).to_double();
  o.check(f <= d / 5, "|Phi(t1,t1+10)| " + g(f) + " <= |Phi(t1,t1)|/5 = " + g(d / 5));
  Real h = abs(off.value - conj(back.value));
  o.check(h <= off.budget + back.budget, "Hermitian defect " + g(h.to_double()) + " within budget " +
                                             g((off.budget + back.budget).to_double()));
  return o;
}

Outcome main_term() {
  Outcome o;
  TransformConfig tc = config30(1e-18, 1e-28);
  int jobs = default_jobs();
  for (long K : {128L, 256L}) {
    WorkingPrecision wp(tc.cfg);
    MainTermResult r = main_term_limit(params(K, 4), 0.01, 64, tc, jobs, true);
    double mag = abs(r.value).to_double();
    std::string tag = "K=" + std::to_string(K) + " ";
    o.check(r.stability <= 1e-6 * mag, tag + "radius change " + g(r.stability / mag));
    double im = std::fabs(r.value.im.to_double()) / mag;
    o.check(im <= 1e-8, tag + "Im/|value| " + g(im));
    double cap = 100 * std::pow(double(K), 1.1) * 4;
    o.check(mag <= cap, tag + "|value| " + g(mag) + " <= " + g(cap));
  }
  return o;
}

Outcome arithmetic() {
  Outcome o;
  PrecisionConfig cfg = PrecisionConfig::with_digits(30);
  WorkingPrecision wp(cfg);

  bool dims = true;
  for (long k = 12; k <= 100; k += 2) {
    long expect = (k % 12 == 2) ? k / 12 - 1 : k / 12;
    dims = dims && dim_cusp_forms(k) == expect;
  }
  o.check(dims, "dimensions 12..100");

  double hecke = 0, deligne = 0, min_L = 1e300, odd = 0;
  for (long k = 12; k <= 100; k += 2) {
    for (const HeckeForm& f : eigenforms(k, default_length(k), cfg)) {
      hecke = std::max(hecke, f.hecke_defect);
      for (long p = 2; p <= 7; ++p) {
        if (!is_prime(p)) continue;
        for (long pr = p; pr * p <= f.N; pr *= p) {
          hecke = std::max(hecke, abs(f.lambda[p] * f.lambda[pr] - f.lambda[pr * p] - f.lambda[pr / p]).to_double());
        }
      }
      for (long p = 2; p <= 97; ++p) {
        if (is_prime(p)) deligne = std::max(deligne, abs(f.lambda[p]).to_double());
      }
      if (k % 4 == 0) {
        min_L = std::min(min_L, central_L(f, cfg).to_double());
      } else {
        AfeOptions split;
        split.split = 1.25;
        odd = std::max(odd, abs(central_L_sum(f, cfg, split)).to_double());
      }
    }
  }
  o.check(hecke <= 1e-8, "Hecke defect " + g(hecke));
  o.check(deligne <= 2 + 1e-6, "max |lambda(p)| " + g(deligne));
  o.check(odd <= 1e-12, "k = 2 mod 4 central sums " + g(odd));
  o.check(min_L >= -1e-8, "min L(1/2) " + g(min_L));

  auto tau = discriminant_product(20);
  HeckeForm delta = eigenforms(12, 360, cfg)[0];
  bool tau_ok = true;
  for (long n = 1; n <= 20; ++n) {
    Real scaled = delta.lambda[n] * pow(Real(n), Real(5.5));
    tau_ok = tau_ok && std::fabs(scaled.to_double() - tau[n].get_d()) <= 1e-6 * std::max(1.0, std::fabs(tau[n].get_d()));
  }
  o.check(tau_ok, "tau(n), n <= 20");

  double afe = 0;
  for (long k : {12L, 24L, 40L, 56L}) {
    for (const HeckeForm& f : eigenforms(k, default_length(k), cfg)) {
      Real L = central_L(f, cfg);
      AfeOptions longer;
      longer.length = f.N;
      afe = std::max(afe, abs(central_L_sum(f, cfg, longer) - L).to_double());
      AfeOptions gauss;
      gauss.kernel = AfeKernel::gaussian;
      gauss.width = 4;
      if (k == 12) gauss.length = 60;
      afe = std::max(afe, abs(central_L_sum(f, cfg, gauss) - L).to_double());
    }
  }
  o.check(afe <= 1e-8, "AFE cutoff and kernel swap " + g(afe));

  double L12 = central_L(delta, cfg).to_double();
  double oracle = double(theta_integral_weight12());
  o.check(std::fabs(L12 - oracle) <= 1e-6, "weight 12 vs theta integral " + g(std::fabs(L12 - oracle)));
  return o;
}

Outcome moments() {
  Outcome o;
  PrecisionConfig cfg = PrecisionConfig::with_digits(30);
  WorkingPrecision wp(cfg);
  MomentTable t = moment_table(12, 100, cfg, default_jobs());
  double m4 = fourth_moment_ratio(t), weyl = weyl_ratio(t);
  o.check(m4 <= 10, "max M4/(k^4/3 log^20/3) " + g(m4));
  o.check(weyl <= 10, "max Weyl ratio " + g(weyl));
  bool mono = true;
  for (long T : {12L, 24L, 50L}) {
    Real prev_S;
    bool first = true;
    for (double V = 1e-6; V < 1e6; V *= 1.7) {
      DyadicStats s = dyadic_stats(t, T, V);
      if (!first) mono = mono && s.S <= prev_S && s.S_star <= s.S;
      prev_S = s.S;
      first = false;
    }
  }
  o.check(mono, "dyadic sums monotone in V");
  return o;
}

// Every term of b moves from a by at most its budget in a (plus b's own budget).
void compare_caps(Outcome& o, const ReciprocityReport& a, const ReciprocityReport& b) {
  auto cmp = [&](const char* name, double x, double y, double bx, double by) {
    double d = std::fabs(x - y);
    o.check(d <= bx + by, std::string(name) + " moved " + g(d) + " within " + g(bx + by));
  };
  cmp("eisenstein", a.rhs_eisenstein_plus, b.rhs_eisenstein_plus, a.budgets.rhs_eisenstein_plus,
      b.budgets.rhs_eisenstein_plus);
  cmp("dual", a.rhs_holomorphic_dual, b.rhs_holomorphic_dual, a.budgets.rhs_holomorphic_dual,
      b.budgets.rhs_holomorphic_dual);
  cmp("maass", a.rhs_maass_plus, b.rhs_maass_plus, a.budgets.rhs_maass_plus, b.budgets.rhs_maass_plus);
  cmp("main", a.rhs_main_term, b.rhs_main_term, a.budgets.rhs_main_term, b.budgets.rhs_main_term);
  cmp("lhs", a.lhs_holomorphic, b.lhs_holomorphic, a.budgets.lhs_holomorphic, b.budgets.lhs_holomorphic);
}

Outcome report() {
  Outcome o;
  TestFunctionParams p = params(12, 2);
  TransformConfig tc = config30(1e-10, 1e-10);
  WorkingPrecision wp(tc.cfg);
  SpectralDataset ds = load_spectral_data(WML_DATA_DIR "/maass_sample_v1.csv");
  ReportOptions opt;
  opt.k_cap = 60;
  opt.jobs = default_jobs();
  ReportCache cache;
  ReciprocityReport a = reciprocity_report(p, ds, tc, opt, &cache);
  std::string json = a.to_json();

  const ReportBudgets& b = a.budgets;
  bool budgets = true;
  for (double x : {b.lhs_holomorphic, b.rhs_maass_plus, b.rhs_eisenstein_plus, b.rhs_holomorphic_dual, b.rhs_main_term,
                   b.maass_tail_budget}) {
    budgets = budgets && std::isfinite(x) && x >= 0;
  }
  o.check(budgets, "budgets finite and nonnegative");
  o.check(a.residual == report_residual(a.lhs_holomorphic, a.rhs_maass_plus, a.rhs_eisenstein_plus,
                                        a.rhs_holomorphic_dual, a.rhs_main_term),
          "residual " + g(a.residual));
  o.check(a.lhs_holomorphic > 0, "lhs " + g(a.lhs_holomorphic) + " > 0");
  o.check(!a.assumptions.empty(), "assumptions listed");

  ReciprocityReport again = reciprocity_report(p, ds, tc, opt, &cache);
  o.check(again.to_json() == json, "re-run byte-identical");

  ReportOptions doubled = opt;
  doubled.t_cap = 2 * 2 * 12 * std::log(12.0) / 2;
  doubled.k_cap = 2 * opt.k_cap;
  ReciprocityReport c = reciprocity_report(p, ds, tc, doubled, &cache);
  compare_caps(o, a, c);
  std::cerr << json;
  return o;
}

struct Criterion {
  const char* title;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {"dual-path test function", dual_path},
      {"center normalization, support and Gaussian decay", normalization},
      {"Bessel-integral oracle", bessel_oracle},
      {"Mellin oracle", mellin},
      {"regime-bound report", regime},
      {"transform properties at K=512, L=8", transforms},
      {"stationary-phase verification", stationary},
      {"oscillation cancellation", oscillation},
      {"main-term limit", main_term},
      {"arithmetic pipeline", arithmetic},
      {"moment tables", moments},
      {"end-to-end reciprocity report", report},
  };
  return all;
}

int run_one(int n) {
  const Criterion& c = criteria()[n - 1];
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o.check(false, std::string("error: ") + e.what());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char head[64];
  std::snprintf(head, sizeof head, "criterion %2d %s", n, o.pass() ? "PASS" : "FAIL");
  std::cout << head << " [" << c.title << ", " << g(secs) << " s]: " << o.summary() << std::endl;
  return o.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int n = 0;
  app.add_option("--criterion", n, "criterion number; 0 runs all")
      ->check(CLI::Range(0, static_cast<int>(criteria().size())));
  CLI11_PARSE(app, argc, argv);
  if (n > 0) return run_one(n);
  int failures = 0;
  for (int i = 1; i <= static_cast<int>(criteria().size()); ++i) failures += run_one(i);
  return failures ? 1 : 0;
}
