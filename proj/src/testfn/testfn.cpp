#include "testfn/testfn.hpp"

#include "numerics/errors.hpp"
#include "numerics/quadrature.hpp"
#include "numerics/special.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace wml {

void TestFunctionParams::validate() const {
  require(K > 0 && K % 2 == 0, "K must be a positive even integer");
  require(L > 0 && L % 2 == 0, "L must be a positive even integer");
  require(L2() < K - 1, "need L^2 < K - 1");
  require(delta > 0 && delta < 0.01, "delta must lie in (0, 1/100)");
}

std::vector<std::string> TestFunctionParams::warnings() const {
  std::vector<std::string> w;
  double lo = std::pow(double(K), delta / 8);
  double hi = std::pow(double(K), 1.0 / 3 - delta / 8);
  if (L < lo || L > hi) {
    std::ostringstream os;
    os << "L = " << L << " outside the asymptotic range [" << lo << ", " << hi << "] for K = " << K;
    w.push_back(os.str());
  }
  return w;
}

namespace {

bool in_support(long k, const TestFunctionParams& p) { return k >= p.K - p.L2() && k <= p.K + p.L2(); }

// log(i^k h_hol(k)) for k in the support. Gamma arguments are integers; equal
// arguments in numerator and denominator are cancelled before evaluation.
Real log_weight(long k, const TestFunctionParams& p) {
  long K = p.K, L2 = p.L2();
  std::vector<long> num{L2 / 2 + 1, L2 / 2 + 1, K + L2 / 2, (K - L2 + k) / 2 - 1};
  std::vector<long> den{K - L2 / 2 - 1, (L2 - K + k) / 2 + 1, (K + L2 + k) / 2, (K + L2 - k) / 2 + 1};
  std::sort(num.begin(), num.end());
  std::sort(den.begin(), den.end());
  std::vector<long> n2, d2;
  std::set_difference(num.begin(), num.end(), den.begin(), den.end(), std::back_inserter(n2));
  std::set_difference(den.begin(), den.end(), num.begin(), num.end(), std::back_inserter(d2));
  Real acc;
  for (long a : n2) acc += lngamma(Real(a));
  for (long a : d2) acc -= lngamma(Real(a));
  return acc;
}

Complex i_pow(long e) {
  switch (((e % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

// log of Gamma(L^2/2+1)^2 Gamma(K+L^2/2) / (Gamma(L^2+1) Gamma(K-L^2/2-1))
Real log_prefactor(const TestFunctionParams& p) {
  long K = p.K, L2 = p.L2();
  return 2 * lngamma(Real(L2 / 2 + 1)) + lngamma(Real(K + L2 / 2)) - lngamma(Real(L2 + 1)) -
         lngamma(Real(K - L2 / 2 - 1));
}

// Upper bound for |J_nu(y)| valid for y >= 2 nu: sqrt(2 / (pi sqrt(y^2 - nu^2))) <= sqrt(4 / (sqrt(3) pi y)).
double envelope_coeff() { return std::sqrt(4.0 / (std::sqrt(3.0) * M_PI)); }

}  // namespace

Complex h_hol(long k, const TestFunctionParams& p) {
  p.validate();
  require(k >= 2 && k % 2 == 0, "h_hol: k must be an even integer >= 2");
  if (!in_support(k, p)) return Complex();
  return i_pow(-k) * exp(log_weight(k, p));
}

Real h_hol_weight(long k, const TestFunctionParams& p) {
  p.validate();
  require(k >= 2 && k % 2 == 0, "h_hol: k must be an even integer >= 2");
  if (!in_support(k, p)) return Real(0);
  return exp(log_weight(k, p));
}

mpq_class h_hol_product(long k, const TestFunctionParams& p) {
  p.validate();
  require(k % 2 == 0, "h_hol_product: k must be even");
  require(in_support(k, p), "h_hol_product: k = " + std::to_string(k) + " is outside the support");
  long K = p.K, L2 = p.L2();
  long d = std::labs(K - k);
  mpz_class num = 1, den = 1;
  for (long l = 0; l <= d / 2 - 1; ++l) {
    num *= (L2 - d) / 2 + 1 + l;
    den *= L2 / 2 + 1 + l;
  }
  for (long j = 0; j <= L2; ++j) {
    num *= K - L2 / 2 - 1 + j;
    den *= (K - L2 + k) / 2 - 1 + j;
  }
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

Real H_closed(const Real& x, const TestFunctionParams& p) {
  p.validate();
  require(x > 0.0 && x <= 1e4, "H_closed: x must lie in (0, 1e4]");
  Real logpre = log_prefactor(p) - log(pi()) - p.L2() * log(2 * pi() * x);
  Real y = 4 * pi() * x;
  // log |J_{K-1}(y)| is at most 0 and at least about (K-1) log(e y / 2K) for small y.
  double lead = (p.K - 1) * std::log(std::max(1e-300, M_E * y.to_double() / (2.0 * p.K)));
  double budget = 1e6;
  if (std::fabs(logpre.to_double()) > budget || (lead < 0 && logpre.to_double() + lead < -budget)) {
    fail(ErrorCode::overflow, std::string("H_closed: magnitude outside the precision budget in the ") +
                                  (y.to_double() < p.K - 1 ? "power-law" : "oscillatory") + " regime at x = " +
                                  x.str(8));
  }
  return exp(logpre) * bessel_j(Real(p.K - 1), y);
}

long H_hat_first_pole(const TestFunctionParams& p) { return p.L2() - p.K + 1; }

Complex log_H_hat(const Complex& s, const TestFunctionParams& p) {
  p.validate();
  long K = p.K, L2 = p.L2();
  require(s.re > double(L2 - K - 1) + 1e-6, "H_hat: Re(s) must exceed L^2 - K - 1");
  // numerator Gamma((K - L^2 + s - 1)/2) has poles at s = L^2 - K + 1 - 2n
  Complex a = (s + (K - L2 - 1)) / 2;
  Real n = round(a.re);
  if (n <= 0.0 && abs(a - Complex(n)) < 5e-7) {
    fail(ErrorCode::pole, "H_hat: s = " + to_string(s, 12) + " is within 1e-6 of the pole at " +
                              std::to_string(L2 - K + 1 + 2 * n.to_long()));
  }
  Complex b = (Complex(K + L2 + 1) - s) / 2;
  return log_prefactor(p) - (s + 1L) * log2pi() + log_gamma(a) - log_gamma(b);
}

Complex H_hat(const Complex& s, const TestFunctionParams& p) { return exp(log_H_hat(s, p)); }

Real bessel_transform_oracle(long k, const TestFunctionParams& p, const PrecisionConfig& cfg) {
  p.validate();
  require(p.K <= 40 && p.L <= 4, "bessel_transform_oracle: needs K <= 40 and L <= 4");
  require(k >= 2 && k % 2 == 0, "bessel_transform_oracle: k must be an even integer >= 2");
  WorkingPrecision wp(cfg);

  double tol = 1e-13;
  double xs = (p.K - 1) / (4 * M_PI);
  double x_lo = std::max(p.K, k) * 2 / (4 * M_PI);
  double lead = 2 * M_PI * std::exp(log_prefactor(p).to_double()) / M_PI * std::pow(2 * M_PI, -double(p.L2()));
  double c = lead * std::pow(envelope_coeff(), 2) / (4 * M_PI);
  // tail of c x^{-L^2-2} beyond X
  double X = std::max(x_lo, std::pow(c / ((p.L2() + 1) * tol), 1.0 / (p.L2() + 1)));
  double bound = c * std::pow(X, -double(p.L2() + 1)) / (p.L2() + 1);
  if (X > 2e4) {
    std::ostringstream os;
    os << "bessel_transform_oracle: tail bound " << bound << " at X = " << X << " exceeds the budget";
    fail(ErrorCode::convergence, os.str());
  }

  Real four_pi = 4 * pi();
  Real nu_k(k - 1);
  LineFunction g = [&](const Real& x) {
    return Complex(2 * pi() * H_closed(x, p) * bessel_j(nu_k, four_pi * x) / x);
  };
  QuadOptions opt;
  opt.abs_floor = tol;
  opt.breakpoints.push_back(xs);
  opt.breakpoints.push_back((k - 1) / (4 * M_PI));
  for (double x = xs + 0.25; x < X; x += 0.25) opt.breakpoints.push_back(x);
  QuadResult r = quad_line(g, Real(0), Real(X), cfg, opt);
  return r.value.re;
}

Complex mellin_oracle(const Complex& s, const TestFunctionParams& p, const PrecisionConfig& cfg) {
  p.validate();
  require(p.K <= 40 && p.L <= 4, "mellin_oracle: needs K <= 40 and L <= 4");
  double sigma = s.re.to_double();
  require(sigma > H_hat_first_pole(p) && sigma < p.L2() + 0.5,
          "mellin_oracle: Re(s) must lie in (L^2 - K + 1, L^2 + 1/2) for absolute convergence");
  WorkingPrecision wp(cfg);

  double tol = 1e-12;
  double xs = (p.K - 1) / (4 * M_PI);
  double x_lo = 2 * p.K / (4 * M_PI);
  double expo = p.L2() + 0.5 - sigma;
  double c = std::exp(log_prefactor(p).to_double()) / M_PI * std::pow(2 * M_PI, -double(p.L2())) *
             envelope_coeff() / std::sqrt(4 * M_PI);
  double X = std::max(x_lo, std::pow(c / (expo * tol), 1.0 / expo));
  if (X > 2e4) {
    std::ostringstream os;
    os << "mellin_oracle: tail bound " << c * std::pow(2e4, -expo) / expo << " at X = 2e4 exceeds the budget";
    fail(ErrorCode::convergence, os.str());
  }

  Complex sm1 = s - 1L;
  LineFunction g = [&](const Real& x) { return H_closed(x, p) * pow(x, sm1); };
  QuadOptions opt;
  opt.abs_floor = tol;
  opt.breakpoints.push_back(xs);
  for (double x = xs + 0.25; x < X; x += 0.25) opt.breakpoints.push_back(x);
  return quad_line(g, Real(0), Real(X), cfg, opt).value;
}

Real regime_bound(const TestFunctionParams& p, double sigma, double tau, int* regime) {
  Real K(p.K), L(p.L);
  Real at = abs(Real(tau));
  int r;
  Real b;
  if (at <= K / L) {
    r = 1;
    b = pow(K, Real(sigma)) * L;
  } else if (at <= K) {
    r = 2;
    b = pow(K, Real(sigma)) * L * exp(-sqr(L * at / (2 * K)));
  } else {
    b = L * pow(at, Real(sigma)) * pow(at / K, -(p.L2() + 1));
    if (at <= K * L) {
      r = 3;
      b *= exp(-sqr(K * L / (2 * at)));
    } else {
      r = 4;
    }
  }
  if (regime) *regime = r;
  return b;
}

RegimeBoundReport regime_bound_report(const TestFunctionParams& p, double sigma, const std::vector<double>& tau_grid) {
  p.validate();
  require(sigma > H_hat_first_pole(p), "regime_bound_report: sigma must lie right of the first pole of H_hat");
  RegimeBoundReport rep;
  rep.sigma = sigma;
  for (double tau : tau_grid) {
    RegimeRow row;
    row.tau = tau;
    row.abs_H_hat = exp(log_H_hat(Complex(Real(sigma), Real(tau)), p).re);
    row.bound = regime_bound(p, sigma, tau, &row.regime);
    row.ratio = row.abs_H_hat / row.bound;
    rep.grid.push_back(std::move(row));
  }

  // least squares of log|H_hat| on tau^2 over [K/L, K/2]
  const int n = 64;
  double a = double(p.K) / p.L, b = p.K / 2.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    double tau = a + (b - a) * i / (n - 1);
    double x = tau * tau;
    double y = log_H_hat(Complex(Real(sigma), Real(tau)), p).re.to_double();
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  rep.fitted_gaussian_rate = -slope;
  rep.predicted_gaussian_rate = std::pow(double(p.L) / (2.0 * p.K), 2);
  return rep;
}

double gaussian_decay_constant(const TestFunctionParams& p) {
  p.validate();
  double c = 0;
  for (long k = p.K - p.L2(); k <= p.K + p.L2(); k += 2) {
    long d = std::labs(k - p.K);
    if (d < p.L || k < 2) continue;
    Real v = log_weight(k, p) + Real(double(d) * d / (4.0 * p.L2()));
    c = std::max(c, exp(v).to_double());
  }
  return c;
}

double localization_deviation(long k, const TestFunctionParams& p) {
  p.validate();
  require(in_support(k, p) && k >= 2 && k % 2 == 0, "localization_deviation: k outside the support");
  double d = double(p.K - k);
  Real v = log_weight(k, p) + Real(d * d / (2.0 * p.L2())) - Real(d * p.L2() / (2.0 * p.K));
  return std::fabs(v.to_double());
}

bool minus_channel_factor_vanishes(const TestFunctionParams& p) { return (p.K - p.L2()) % 2 == 0; }

}  // namespace wml
