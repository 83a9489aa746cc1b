#include "kernels/kernels.hpp"

#include "numerics/errors.hpp"
#include "numerics/parallel.hpp"
#include "numerics/quadrature.hpp"
#include "numerics/special.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wml {

std::string variant_name(KernelVariant v) {
  switch (v) {
    case KernelVariant::plus: return "plus";
    case KernelVariant::minus: return "minus";
    default: return "hol";
  }
}

KernelVariant parse_variant(const std::string& name) {
  if (name == "plus") return KernelVariant::plus;
  if (name == "minus") return KernelVariant::minus;
  if (name == "hol") return KernelVariant::hol;
  fail(ErrorCode::invalid_argument, "unknown kernel variant '" + name + "' (expected plus, minus or hol)");
}

namespace {

// Beyond this |Im w| the trigonometric factors are formed from their dominant exponential.
constexpr double kTrigSwitch = 8.0;

Complex log_sin_pi(const Complex& w) {
  if (abs(w.im) < kTrigSwitch) return log(sin_pi(w));
  Complex iw = times_i(w) * pi();
  if (w.im > 0.0) {
    // sin(pi w) = (i/2) e^{-i pi w} (1 - e^{2 pi i w})
    return log(Complex(1) - exp(iw * 2L)) - iw + Complex(-log(Real(2)), pi() / 2);
  }
  // sin(pi w) = (-i/2) e^{i pi w} (1 - e^{-2 pi i w})
  return log(Complex(1) - exp(-iw * 2L)) + iw + Complex(-log(Real(2)), -pi() / 2);
}

Complex log_cos_pi(const Complex& w) {
  if (abs(w.im) < kTrigSwitch) return log(cos_pi(w));
  Complex iw = times_i(w) * pi();
  if (w.im > 0.0) return log(Complex(1) + exp(iw * 2L)) - iw - log(Real(2));
  return log(Complex(1) + exp(-iw * 2L)) + iw - log(Real(2));
}

// log(sin^2(pi w) + 1) = log((3 - cos(2 pi w)) / 2)
Complex log_sin2_plus_one(const Complex& w) {
  if (abs(w.im) < kTrigSwitch) {
    Complex sn = sin_pi(w);
    return log(sn * sn + 1L);
  }
  Complex two_pi_iw = times_i(w) * (pi() * 2);
  Complex u = w.im > 0.0 ? exp(two_pi_iw) : exp(-two_pi_iw);
  Complex lead = w.im > 0.0 ? -two_pi_iw : two_pi_iw;
  return log(Complex(1) - u * 6L + u * u) - log(Real(4)) + lead + Complex(Real(0), pi());
}

Real log_cosh_pi(double t) {
  Real a = abs(Real(t)) * pi();
  return a + log1p(exp(-2 * a)) - log(Real(2));
}

void check_gamma_pole(const Complex& w, const std::string& family) {
  Real n = round(w.re);
  if (n <= 0.0 && abs(w - Complex(n)) < 5e-7) {
    fail(ErrorCode::pole, "kernel pole: s is within 1e-6 of the family " + family);
  }
}

void check_kernel_poles(KernelVariant v, const Complex& s, double arg) {
  Complex half = s / 2;
  if (v == KernelVariant::hol) {
    check_gamma_pole((s + (arg - 1)) / 2, "s = 1 - k - 2l");
  } else {
    Complex it(Real(0), Real(arg));
    check_gamma_pole(half + it, "s = -2(it + l)");
    check_gamma_pole(half - it, "s = -2(-it + l)");
  }
  check_gamma_pole((Complex(1) - s) / 2, "s = 2l + 1");
}

Complex log_i_pow_neg(long k) {
  // i^{-k} for even k is (-1)^{k/2}
  return (k / 2) % 2 ? Complex(Real(0), pi()) : Complex();
}

// Parts of the kernel logarithm that do not depend on the spectral argument.
Complex log_kernel_common(KernelVariant v, const Complex& s) {
  Complex c = s * log2pi() + log_gamma((Complex(1) - s) / 2) * 4L;
  Complex half = s / 2;
  switch (v) {
    case KernelVariant::plus:
      return c - log(pi()) * 2 + log_cos_pi(half) + log_sin2_plus_one(half);
    case KernelVariant::minus:
      return c + log(Real(2)) - log(pi()) * 2 + log_sin_pi(half);
    default:
      return c - log(pi()) + log_sin2_plus_one(half);
  }
}

Complex log_kernel_arg(KernelVariant v, const Complex& s, double arg) {
  if (v == KernelVariant::hol) {
    long k = std::lround(arg);
    return log_gamma((s + (k - 1)) / 2) - log_gamma((Complex(1 + k) - s) / 2) + log_i_pow_neg(k);
  }
  Complex half = s / 2;
  Complex it(Real(0), Real(arg));
  Complex r = log_gamma(half + it) + log_gamma(half - it);
  if (v == KernelVariant::minus) r += Complex(log_cosh_pi(arg));
  return r;
}

void check_arg(KernelVariant v, double arg) {
  if (v == KernelVariant::hol) {
    require(arg >= 2 && std::fabs(arg - std::lround(arg)) == 0 && std::lround(arg) % 2 == 0,
            "hol kernel needs an even integer weight k >= 2");
  }
}

}  // namespace

Complex log_kernel(KernelVariant v, const Complex& s, double arg) {
  check_arg(v, arg);
  check_kernel_poles(v, s, arg);
  return log_kernel_common(v, s) + log_kernel_arg(v, s, arg);
}

Complex kernel_eval(KernelVariant v, const Complex& s, double arg) {
  check_arg(v, arg);
  check_kernel_poles(v, s, arg);
  if (v == KernelVariant::minus && s.im.is_zero()) {
    Real h = s.re / 2;
    if (h == round(h)) return Complex();  // sin(pi s / 2) = 0
  }
  return exp(log_kernel(v, s, arg));
}

void TransformConfig::validate() const {
  require(sigma > 0 && sigma < 1, "transform: sigma must lie in (0, 1)");
  require(tau_max >= 0, "transform: tau_max must be nonnegative");
  require(order >= 4 && order <= 400, "transform: quadrature order out of range");
  cfg.validate();
}

namespace {

// Panel edges on [0, end]: width h up to knee, then geometric.
std::vector<double> transform_breakpoints(double knee, double end, double h, double ratio = 1.3) {
  return graded_edges(0, knee, end, h, ratio);
}

struct TailChoice {
  double tau_max;
  Real bound;  // estimated integral of |f| beyond tau_max
};

// Doubles tau from `start` until the power-law tail estimate |f(T)| T / (p - 1),
// with p the local decay exponent between T/2 and T, is below `target` for every component.
template <typename LogF>
TailChoice choose_tail(const LogF& log_f, double start, const Real& target, const std::string& what) {
  Real log_target = log(target);
  for (double T = start; T <= 2e7; T *= 2) {
    std::vector<Complex> a = log_f(T / 2), b = log_f(T);
    bool ok = true;
    Real worst;
    bool have = false;
    for (std::size_t c = 0; c < a.size(); ++c) {
      double p = ((a[c].re - b[c].re) / log(Real(2))).to_double();
      if (!(p > 1.5)) {
        ok = false;
        break;
      }
      Real lt = b[c].re + std::log(T / (p - 1));
      if (!have || lt > worst) {
        worst = lt;
        have = true;
      }
      if (lt > log_target) ok = false;
    }
    if (ok) return {T, have ? exp(worst) : Real(0)};
  }
  fail(ErrorCode::convergence,
       what + ": tail budget not met below tau = 2e7; raise tail_threshold or use a larger L");
}

}  // namespace

TransformGrid transform_grid(KernelVariant v, const std::vector<double>& args, const TestFunctionParams& p,
                             const TransformConfig& tc) {
  p.validate();
  tc.validate();
  require(!args.empty(), "transform: empty argument grid");
  for (double a : args) check_arg(v, a);
  WorkingPrecision wp(tc.cfg);

  double amax = 0;
  for (double a : args) amax = std::max(amax, std::fabs(a));
  double floor_tau = 4 * std::max(v == KernelVariant::hol ? 0.0 : 2 * amax, double(p.K));
  if (tc.tau_max > 0) {
    require(tc.tau_max >= floor_tau, "transform: tau_max must be at least 4 max(2|t|, K)");
  }
  Real sigma(tc.sigma);
  std::size_t n = args.size();

  auto log_f = [&](double tau) {
    Complex s(sigma, Real(tau));
    Complex base = log_H_hat(s, p) + log_kernel_common(v, s);
    std::vector<Complex> out;
    out.reserve(n);
    for (double a : args) out.push_back(base + log_kernel_arg(v, s, a));
    return out;
  };

  Real scale = tc.fold ? pi() : 2 * pi();
  TailChoice tail;
  if (tc.tau_max > 0) {
    tail.tau_max = tc.tau_max;
    std::vector<Complex> a = log_f(tc.tau_max / 2), b = log_f(tc.tau_max);
    Real worst(0);
    for (std::size_t c = 0; c < n; ++c) {
      double pe = ((a[c].re - b[c].re) / log(Real(2))).to_double();
      Real lt = exp(b[c].re) * (tc.tau_max / std::max(pe - 1, 0.5));
      worst = max(worst, lt);
    }
    tail.bound = worst;
  } else {
    tail = choose_tail(log_f, floor_tau, Real(tc.cfg.tail_threshold) * scale, "transform");
  }

  MultiLineFunction g = [&](const Real& tau, std::vector<Complex>& out) {
    Complex s(sigma, tau);
    Complex base = log_H_hat(s, p) + log_kernel_common(v, s);
    for (std::size_t c = 0; c < n; ++c) out[c] = exp(base + log_kernel_arg(v, s, args[c]));
  };

  double knee = std::max({2.5 * 2 * amax, 1.5 * p.K, 40.0});
  knee = std::min(knee, tail.tau_max);
  QuadOptions opt;
  opt.order = tc.order;
  opt.max_panels = 200000;
  opt.breakpoints = transform_breakpoints(knee, tail.tau_max, 16.0);
  if (!tc.fold) {
    std::vector<double> mirrored;
    for (double x : opt.breakpoints) mirrored.push_back(-x);
    opt.breakpoints.insert(opt.breakpoints.end(), mirrored.begin(), mirrored.end());
  }
  Real lo = tc.fold ? Real(0) : Real(-tail.tau_max);
  MultiQuadResult q = quad_line_multi(g, n, lo, Real(tail.tau_max), tc.cfg, opt);

  TransformGrid grid;
  grid.variant = v;
  grid.tau_max = tail.tau_max;
  grid.evaluations = q.evaluations;
  for (std::size_t c = 0; c < n; ++c) {
    TransformValue row;
    row.arg = args[c];
    if (tc.fold) {
      row.value = Complex(q.value[c].re / pi());
      row.error = (q.error[c] + tail.bound) / pi();
    } else {
      row.value = q.value[c] / (2 * pi());
      row.error = (q.error[c] + 2 * tail.bound) / (2 * pi());
    }
    grid.rows.push_back(std::move(row));
  }
  return grid;
}

TransformValue transform_eval(KernelVariant v, double arg, const TestFunctionParams& p, const TransformConfig& tc) {
  return transform_grid(v, {arg}, p, tc).rows.front();
}

double stationary_root(double t, double K) {
  auto f = [&](double y) { return K * K * y * (y + 4 * t) - std::pow(2 * t + y, 4); };
  // K^2 y (y + 4t) / (2t + y)^4 peaks at y = (sqrt 8 - 2) t with value K^2 / (16 t^2); f < 0 at 0
  require(t > 0 && t < K / 4, "stationary_root: need 0 < t < K/4");
  double lo = 0, hi = (std::sqrt(8.0) - 2) * t;
  for (int i = 0; i < 200; ++i) {
    double m = 0.5 * (lo + hi);
    if (f(m) > 0) hi = m;
    else lo = m;
  }
  return 0.5 * (lo + hi);
}

StationaryPointResult locate_stationary_point(double t, const TestFunctionParams& p, const TransformConfig& tc) {
  p.validate();
  tc.validate();
  double K = double(p.K);
  require(t > std::pow(K, 2.0 / 3 + 0.05) && t < K / 4,
          "locate_stationary_point: need K^{2/3+0.05} < t < K/4");
  WorkingPrecision wp(tc.cfg);
  Real sigma(tc.sigma);

  auto phase = [&](double y) {
    Complex s(sigma, Real(2 * t + y));
    return (log_H_hat(s, p) + log_kernel(KernelVariant::plus, s, t)).im;
  };
  auto wrap = [](Real d) {
    Real two_pi = 2 * pi();
    return d - two_pi * round(d / two_pi);
  };
  auto deriv = [&](double y) {
    double h = 1e-4 * std::max(1.0, y);
    return (wrap(phase(y + h) - phase(y - h)) / (2 * h)).to_double();
  };

  StationaryPointResult r;
  r.t = t;
  r.y_predicted = stationary_root(t, K);
  r.window_lo = t * t * t / std::pow(K, 2.2);
  r.window_hi = t * t * t / std::pow(K, 1.8);

  double lo = r.window_lo, hi = r.window_hi;
  for (int extension = 0; extension <= 4; ++extension) {
    for (int npts = 32; npts <= 1 << 16; npts *= 2) {
      std::vector<double> ys(npts);
      for (int i = 0; i < npts; ++i) ys[i] = lo * std::pow(hi / lo, double(i) / (npts - 1));
      std::vector<Real> ph;
      ph.reserve(npts);
      bool fine = true;
      Real acc = phase(ys[0]);
      ph.push_back(acc);
      for (int i = 1; i < npts && fine; ++i) {
        Real step = wrap(phase(ys[i]) - phase(ys[i - 1]));
        if (abs(step) >= pi() / 2) fine = false;
        acc += step;
        ph.push_back(acc);
      }
      if (!fine) continue;
      r.grid_points = npts;
      std::vector<double> mids, d;
      for (int i = 0; i + 1 < npts; ++i) {
        mids.push_back(0.5 * (ys[i] + ys[i + 1]));
        d.push_back(((ph[i + 1] - ph[i]) / (ys[i + 1] - ys[i])).to_double());
      }
      for (std::size_t i = 0; i + 1 < d.size(); ++i) {
        if ((d[i] < 0) != (d[i + 1] < 0)) {
          double a = mids[i], b = mids[i + 1];
          double da = deriv(a);
          for (int it = 0; it < 60 && b - a > 1e-10 * b; ++it) {
            double m = 0.5 * (a + b);
            double dm = deriv(m);
            if ((dm < 0) == (da < 0)) {
              a = m;
              da = dm;
            } else {
              b = m;
            }
          }
          r.y_located = 0.5 * (a + b);
          r.window_hi = hi;
          r.window_extended = extension > 0;
          r.rel_deviation = std::fabs(r.y_located - r.y_predicted) / r.y_predicted;
          return r;
        }
      }
      break;
    }
    lo = hi;
    hi *= 2;
    if (hi > t) break;
  }
  fail(ErrorCode::convergence, "no stationary point in window [" + std::to_string(r.window_lo) + ", " +
                                   std::to_string(hi) + "] for t = " + std::to_string(t));
}

double omega_bump(double x) {
  auto phi = [](double u) {
    if (u <= 0) return 0.0;
    if (u >= 1) return 1.0;
    double a = std::exp(-1 / u), b = std::exp(-1 / (1 - u));
    return a / (a + b);
  };
  if (x <= 0.5 || x >= 2.5) return 0;
  if (x < 1) return phi((x - 0.5) / 0.5);
  if (x <= 2) return 1;
  return phi((2.5 - x) / 0.5);
}

OscillationResult oscillation_sum(double t1, double t2, long T, long L, const TransformConfig& tc, int jobs) {
  tc.validate();
  require(T >= 2 && T <= 512, "oscillation_sum: T must lie in [2, 512]");
  require(L > 0 && L % 2 == 0, "oscillation_sum: L must be a positive even integer");
  double lo = std::pow(double(T), 2.0 / 3 + 0.05), hi = T * std::log(double(T)) / L;
  require(std::fabs(t1) > lo && std::fabs(t1) < hi && std::fabs(t2) > lo && std::fabs(t2) < hi,
          "oscillation_sum: need T^{2/3+0.05} < |t1|, |t2| < T log T / L");

  std::vector<long> Ks;
  for (long K = 2; K < 5 * T / 2 + 2; K += 2) {
    if (omega_bump(double(K) / T) > 0 && L * L < K - 1) Ks.push_back(K);
  }
  require(!Ks.empty(), "oscillation_sum: no admissible K");
  bool diag = t1 == t2;
  std::vector<double> ts{t1};
  if (!diag) ts.push_back(t2);

  // split the K range into contiguous chunks, one shared quadrature per chunk
  int chunks = std::max(1, std::min<int>(jobs, int(Ks.size())));
  std::vector<std::vector<long>> parts(chunks);
  for (std::size_t i = 0; i < Ks.size(); ++i) parts[i * chunks / Ks.size()].push_back(Ks[i]);

  WorkingPrecision wp(tc.cfg);
  auto run = [&](std::size_t part) {
    const std::vector<long>& ks = parts[part];
    std::size_t nk = ks.size(), nt = ts.size(), dim = nk * nt;
    Real sigma(tc.sigma);
    TestFunctionParams p0;
    p0.K = ks.front();
    p0.L = L;
    // H_hat for K + 2 is H_hat for K times (a/b) c with a = (K - L^2 + s - 1)/2, b = (K + L^2 - s + 1)/2
    // and c = (K + L^2/2)(K + L^2/2 + 1) / ((K - L^2/2 - 1)(K - L^2/2)).
    long L2 = L * L;
    auto fill = [&](const Complex& s, std::vector<Complex>& hh) {
      hh.resize(nk);
      hh[0] = H_hat(s, p0);
      for (std::size_t i = 1; i < nk; ++i) {
        Complex cur = hh[i - 1];
        for (long K = ks[i - 1]; K < ks[i]; K += 2) {
          Complex a = (s + (K - L2 - 1)) / 2;
          Complex b = (Complex(K + L2 + 1) - s) / 2;
          Real c = Real((K + L2 / 2) * (K + L2 / 2 + 1)) / Real((K - L2 / 2 - 1) * (K - L2 / 2));
          cur = cur * a / b * c;
        }
        hh[i] = std::move(cur);
      }
    };
    auto log_f = [&](double tau) {
      Complex s(sigma, Real(tau));
      std::vector<Complex> hh;
      fill(s, hh);
      Complex common = log_kernel_common(KernelVariant::plus, s);
      std::vector<Complex> out;
      for (double t : ts) {
        Complex lg = common + log_kernel_arg(KernelVariant::plus, s, t);
        for (std::size_t i = 0; i < nk; ++i) out.push_back(lg + log(hh[i]));
      }
      return out;
    };
    double floor_tau = 4 * std::max(2 * std::max(std::fabs(t1), std::fabs(t2)), double(ks.back()));
    TailChoice tail = choose_tail(log_f, floor_tau, Real(tc.cfg.tail_threshold) * pi(), "oscillation_sum");

    MultiLineFunction g = [&](const Real& tau, std::vector<Complex>& out) {
      Complex s(sigma, tau);
      std::vector<Complex> hh;
      fill(s, hh);
      Complex common = log_kernel_common(KernelVariant::plus, s);
      for (std::size_t j = 0; j < nt; ++j) {
        Complex kern = exp(common + log_kernel_arg(KernelVariant::plus, s, ts[j]));
        for (std::size_t i = 0; i < nk; ++i) out[j * nk + i] = kern * hh[i];
      }
    };
    double knee = std::max({5 * std::max(std::fabs(t1), std::fabs(t2)), 1.5 * ks.back(), 40.0});
    QuadOptions opt;
    opt.order = tc.order;
    opt.max_panels = 200000;
    opt.breakpoints = transform_breakpoints(std::min(knee, tail.tau_max), tail.tau_max, 4.0);
    MultiQuadResult q = quad_line_multi(g, dim, Real(0), Real(tail.tau_max), tc.cfg, opt);

    Complex sum;
    Real budget;
    for (std::size_t i = 0; i < nk; ++i) {
      double w = omega_bump(double(ks[i]) / T);
      Real h1 = q.value[i].re / pi();
      Real e1 = (q.error[i] + tail.bound) / pi();
      Real h2 = diag ? h1 : q.value[nk + i].re / pi();
      Real e2 = diag ? e1 : (q.error[nk + i] + tail.bound) / pi();
      // transforms are real, so conj(h2) = h2
      sum += Complex(h1 * h2 * w);
      budget += (abs(h1) * e2 + abs(h2) * e1 + e1 * e2) * w;
    }
    return std::make_pair(std::move(sum), std::move(budget));
  };

  auto partials = parallel_map(parts.size(), jobs, run);
  OscillationResult r;
  for (auto& pr : partials) {
    r.value += pr.first;
    r.budget += pr.second;
  }
  r.terms = int(Ks.size());
  return r;
}

namespace {

struct MainTermNode {
  Complex value;
  Real error;
};

}  // namespace

double main_term_abscissa(double radius) { return 1 + std::max(0.125, 18 * radius + 0.07); }

Complex main_term_at(const Complex& z, const TestFunctionParams& p, const TransformConfig& tc, Real* error,
                     double abscissa) {
  std::vector<Complex> zj;
  for (int j = 1; j <= 4; ++j) zj.push_back(Complex(Real(0.5)) + z * long(j));
  Complex S = zj[0] + zj[1] + zj[2] + zj[3];

  // first sum
  Complex first;
  for (int j = 0; j < 4; ++j) {
    Complex term = H_hat((Complex(1) - zj[j]) * 2L, p);
    for (int l = 0; l < 4; ++l) {
      if (l != j) term = term * zeta(Complex(1) - zj[j] + zj[l]);
    }
    for (int m = 0; m < 4; ++m) {
      for (int n = m + 1; n < 4; ++n) {
        if (m != j && n != j) term = term * zeta(zj[m] + zj[n]);
      }
    }
    term = term / zeta(Complex(1) - zj[j] + S - zj[j]);
    first += term * 2L;
  }

  Real sigma(abscissa > 0 ? abscissa : main_term_abscissa(abs(z).to_double()));

  auto cos_half = [&](const Complex& w) { return cos_pi(w / 2); };  // cos(pi w / 2)
  Complex c12 = cos_half(zj[0] - zj[1]), c34 = cos_half(zj[2] - zj[3]);
  auto trig_plus = [&](const Complex& s) {
    Complex a = cos_half(s + zj[0] + zj[1]), b = cos_half(s + zj[2] + zj[3]);
    return sin_pi((s + S - 1L) / 2) * (a * b + c12 * c34);
  };
  auto trig_minus = [&](const Complex& s, int j) {
    Complex a = cos_half(s + zj[0] + zj[1]), b = cos_half(s + zj[2] + zj[3]);
    return cos_half(S - zj[j] * 2L) * (c12 * b + a * c34);
  };

  // Direct form: H_hat (2 pi)^s Gamma(s/2 + S - z_j - 2) Gamma(s/2 + z_j) prod_{m != skip} Gamma(1 - z_m - s/2)
  auto log_direct = [&](const Complex& s, int j, int skip_m) {
    Complex r = log_H_hat(s, p) + s * log2pi() + log_gamma(s / 2 + S - zj[j] - 2L) + log_gamma(s / 2 + zj[j]);
    for (int m = 0; m < 4; ++m) {
      if (m != skip_m) r += log_gamma(Complex(1) - zj[m] - s / 2);
    }
    return r;
  };

  // On the line, Gamma(1 - z_m - s/2) = pi / (sin(pi (s/2 + z_m)) Gamma(s/2 + z_m)).
  Real log_pi4 = log(pi()) * 4;
  auto log_parts = [&](const Complex& s, std::vector<Complex>& out) {
    Complex base = log_H_hat(s, p) + s * log2pi() + log_pi4;
    std::vector<Complex> lg(4);
    for (int m = 0; m < 4; ++m) {
      Complex w = s / 2 + zj[m];
      lg[m] = log_gamma(w);
      base -= log(sin_pi(w));
    }
    Complex all = lg[0] + lg[1] + lg[2] + lg[3];
    out.resize(4);
    for (int j = 0; j < 4; ++j) out[j] = base - all + lg[j] + log_gamma(s / 2 + S - zj[j] - 2L);
  };

  auto integrand = [&](const Real& tau, std::vector<Complex>& out) {
    Complex s(sigma, tau);
    std::vector<Complex> lp;
    log_parts(s, lp);
    Complex tp = trig_plus(s);
    for (int j = 0; j < 4; ++j) {
      Complex e = exp(lp[j]);
      out[2 * j] = e * tp;
      out[2 * j + 1] = e * trig_minus(s, j);
    }
  };
  auto log_abs = [&](double tau) {
    std::vector<Complex> v(8);
    integrand(Real(tau), v);
    std::vector<Complex> w(8);
    integrand(Real(-tau), w);
    std::vector<Complex> out;
    for (int i = 0; i < 8; ++i) out.push_back(Complex(log(max(abs(v[i]), abs(w[i])))));
    return out;
  };

  Real scale;
  {
    std::vector<Complex> v(8);
    integrand(Real(0), v);
    for (auto& x : v) scale = max(scale, abs(x));
  }
  Real floor_abs = Real(tc.cfg.tail_threshold) * max(scale, Real(1));
  TailChoice tail = choose_tail(log_abs, 4.0 * p.K, floor_abs, "main term");
  double T = tail.tau_max;

  QuadOptions opt;
  opt.order = tc.order;
  opt.abs_floor = floor_abs.to_double();
  opt.max_panels = 200000;
  for (double x : transform_breakpoints(std::min(1.5 * p.K, T), T, 16.0, 2.0)) {
    opt.breakpoints.push_back(x);
    if (x > 0) opt.breakpoints.push_back(-x);
  }
  MultiQuadResult q = quad_line_multi(integrand, 8, Real(-T), Real(T), tc.cfg, opt);

  // int_line F ds = i int F dtau; prefactor 1/(2 pi^3 i)
  Real pref = 2 * pow(pi(), 3L);
  std::vector<Complex> hp(4), hm(4);
  std::vector<Real> herr(4);
  for (int j = 0; j < 4; ++j) {
    hp[j] = q.value[2 * j] / pref;
    hm[j] = q.value[2 * j + 1] / pref;
    herr[j] = (q.error[2 * j] + q.error[2 * j + 1] + 4 * tail.bound) / pref;
  }

  // Residues between the original contour and the line Re s = sigma:
  // left poles s = 4 + 2 z_j - 2 S lying right of the line (residue factor 2),
  // right poles s = 2 - 2 z_m lying left of it (residue factor -2).
  Real pi2 = sqr(pi());
  for (int j = 0; j < 4; ++j) {
    Complex sl = Complex(4) + zj[j] * 2L - S * 2L;
    if (sl.re > sigma) {
      Complex e = exp(log_H_hat(sl, p) + sl * log2pi() + log_gamma(sl / 2 + zj[j]));
      for (int m = 0; m < 4; ++m) e = e * exp(log_gamma(Complex(1) - zj[m] - sl / 2));
      hp[j] += e * trig_plus(sl) * 2L / pi2;
      hm[j] += e * trig_minus(sl, j) * 2L / pi2;
    }
    for (int m = 0; m < 4; ++m) {
      Complex sr = Complex(2) - zj[m] * 2L;
      if (sr.re < sigma) {
        Complex e = exp(log_direct(sr, j, m));
        hp[j] += e * trig_plus(sr) * 2L / pi2;
        hm[j] += e * trig_minus(sr, j) * 2L / pi2;
      }
    }
  }

  Complex third;
  Real err;
  for (int j = 0; j < 4; ++j) {
    Complex coef(1);
    for (int l = 0; l < 4; ++l) {
      if (l == j) continue;
      Complex inner = S - zj[j] - zj[l] - 1L;
      coef = coef * zeta(Complex(1) + zj[j] - zj[l]) * zeta(inner);
    }
    coef = coef / zeta(Complex(3) + zj[j] * 2L - S);
    third += (hp[j] + hm[j]) * coef * 2L;
    err += herr[j] * abs(coef) * 2;
  }
  if (error) *error = err;
  return first + third;
}

MainTermResult main_term_limit(const TestFunctionParams& p, double radius, int nodes, const TransformConfig& tc,
                               int jobs, bool check_stability) {
  p.validate();
  tc.validate();
  require(radius >= 0.002 && radius <= 0.02, "main_term_limit: radius must lie in [0.002, 0.02]");
  require(nodes >= 64 && (nodes & (nodes - 1)) == 0, "main_term_limit: nodes must be a power of two >= 64");
  WorkingPrecision wp(tc.cfg);

  auto circle = [&](double r, Real& err_out) {
    Real rr(r);
    Real step = 2 * pi() / nodes;
    auto vals = parallel_map(nodes, jobs, [&](std::size_t j) {
      Complex z = polar(rr, step * (Real(long(j)) + 0.5));
      MainTermNode n;
      try {
        n.value = main_term_at(z, p, tc, &n.error);
      } catch (const Error& e) {
        std::ostringstream os;
        os << "main term at node " << j << " (radius " << r << "): " << e.what() << "; try a different radius";
        throw Error(e.code(), os.str());
      }
      return n;
    });
    Complex sum;
    err_out = Real(0);
    for (auto& v : vals) {
      if (!v.value.is_finite()) {
        fail(ErrorCode::convergence, "main term: non-finite value on the circle; try a different radius");
      }
      sum += v.value;
      err_out += v.error;
    }
    err_out /= long(nodes);
    return sum / long(nodes);
  };

  MainTermResult r;
  r.radius = radius;
  r.nodes = nodes;
  r.value = circle(radius, r.quad_error);
  if (check_stability) {
    Real e2;
    Complex half = circle(radius / 2, e2);
    r.stability = abs(r.value - half).to_double();
    r.quad_error = max(r.quad_error, e2);
  }
  return r;
}

}  // namespace wml
