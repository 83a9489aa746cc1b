#include "numerics/errors.hpp"
#include "numerics/special.hpp"

#include <cmath>
#include <vector>

namespace wml {

namespace {

Real series(const Real& nu, const Real& x, int guard_digits) {
  int d = current_digits();
  Real half_x = x / 2;
  Real prefactor = exp(nu * log(half_x) - lngamma(nu + 1));
  PrecisionScope scope(digits_to_bits(d + guard_digits));
  Real q = -(half_x * half_x);
  Real term(1);
  Real sum(1);
  Real eps = pow10(-(d + guard_digits + 2));
  double xd = x.to_double();
  for (long m = 1;; ++m) {
    term *= q;
    term /= m;
    term /= (nu + m);
    sum += term;
    if (m > xd / 2 + 2 && abs(term) < eps * abs(sum)) break;
    if (m > 100000000L) fail(ErrorCode::convergence, "bessel_j: power series did not converge");
  }
  PrecisionScope back(digits_to_bits(d));
  return Real(prefactor) * Real(sum.get());
}

// Returns false if the asymptotic series cannot reach working precision.
bool hankel(const Real& nu, const Real& x, Real& out) {
  int d = current_digits();
  Real mu = nu * nu * 4;
  Real eps = pow10(-(d + 2));
  Real p(1), q;
  Real term(1);
  Real eight_x = x * 8;
  Real prev = abs(term);
  bool done = false;
  for (long k = 1; k < 100000; ++k) {
    long odd = 2 * k - 1;
    term *= (mu - Real(odd) * Real(odd));
    term /= eight_x;
    term /= k;
    if (term.is_zero()) { done = true; break; }
    // terms alternate between Q and P with sign pattern (+Q, -P, -Q, +P, ...)
    long phase = k % 4;
    if (phase == 1) q += term;
    else if (phase == 2) p -= term;
    else if (phase == 3) q -= term;
    else p += term;
    Real mag = abs(term);
    if (mag < eps) { done = true; break; }
    if (k > 2 * x.to_double() + 4 && mag > prev) break;
    prev = mag;
  }
  if (!done) return false;
  Real chi = x - (nu / 2 + 0.25) * pi();
  Real s, c;
  sin_cos(s, c, chi);
  out = sqrt(2 / (pi() * x)) * (p * c - q * s);
  return true;
}

Real miller(const Real& nu, const Real& x) {
  int d = current_digits();
  Real n0r = floor(nu);
  long n0 = n0r.to_long();
  Real alpha = nu - n0r;
  double xd = x.to_double();
  double ex2 = M_E * xd / 2;
  auto excess = [&](double m) { return m > ex2 ? m * std::log10(m / ex2) : 0.0; };
  double base_excess = excess(static_cast<double>(std::max(n0, 1L)));
  long M = static_cast<long>(std::max(static_cast<double>(n0), xd)) + 20;
  while (excess(static_cast<double>(M)) - base_excess < d + 20) M += std::max(10L, M / 10);
  if (M % 2) ++M;

  int guard = static_cast<int>(std::log10(static_cast<double>(M))) + 10;
  PrecisionScope scope(digits_to_bits(d + guard));
  Real two_over_x = Real(2) / x;
  Real f_next;  // f_{k+1}
  Real f(1);    // f_k, starting at k = M
  Real f_at_n0 = n0 == M ? f : Real();
  Real norm_sum;
  bool integer_order = alpha.is_zero();

  // g_k = Gamma(alpha + k) / k!, walked downward from k = M/2
  Real g;
  if (!integer_order) g = exp(lngamma(alpha + M / 2) - lngamma(Real(M / 2 + 1)));
  auto accumulate = [&](long k, const Real& fk) {
    if (k % 2) return;
    long h = k / 2;
    if (integer_order) {
      norm_sum += (k == 0 ? fk : fk * 2);
    } else {
      norm_sum += (alpha + k) * g * fk;
      if (h > 0) g = g * h / (alpha + (h - 1));
    }
  };
  accumulate(M, f);
  for (long k = M; k >= 1; --k) {
    Real f_prev = (alpha + k) * two_over_x * f - f_next;
    f_next = std::move(f);
    f = std::move(f_prev);
    // f now holds f_{k-1}
    if (k - 1 == n0) f_at_n0 = f;
    accumulate(k - 1, f);
    // rescale to keep numbers moderate
    if (f.exponent() > 4096) {
      Real s = ldexp(Real(1), -4096);
      f *= s;
      f_next *= s;
      f_at_n0 *= s;
      norm_sum *= s;
    }
  }
  Real target = integer_order ? Real(1) : exp(alpha * log(x / 2));
  Real val = f_at_n0 * target / norm_sum;
  PrecisionScope back(digits_to_bits(d));
  return Real(val.get());
}

}  // namespace

Real bessel_j(const Real& order, const Real& x) {
  if (!(x > 0.0)) fail(ErrorCode::domain, "bessel_j: x must be positive, got " + x.str(6));
  if (order < 0.0) fail(ErrorCode::domain, "bessel_j: order must be nonnegative");
  int d = current_digits();
  double xd = x.to_double();
  double nu = order.to_double();
  if (xd * xd <= 4 * (nu + 1)) return series(order, x, 4);
  if (xd > 1.2 * (d + 5) && xd > nu * nu / 4) {
    Real out;
    if (hankel(order, x, out)) return out;
  }
  double loss = 0.4343 * xd;
  if (loss < 2 * d) return series(order, x, static_cast<int>(loss) + 10);
  return miller(order, x);
}

}  // namespace wml
