#include "numerics/errors.hpp"
#include "numerics/special.hpp"

#include <cmath>
#include <mutex>
#include <vector>

namespace wml {

const mpq_class& bernoulli_even(int k) {
  static std::mutex mu;
  static std::vector<mpq_class> table{mpq_class(1)};
  std::lock_guard<std::mutex> lock(mu);
  // Akiyama-Tanigawa gives B_n for all n; keep the even ones.
  if (static_cast<int>(table.size()) <= k) {
    int nmax = 2 * k;
    std::vector<mpq_class> a(nmax + 1);
    std::vector<mpq_class> even;
    even.reserve(k + 1);
    for (int m = 0; m <= nmax; ++m) {
      a[m] = mpq_class(1, m + 1);
      for (int j = m; j >= 1; --j) {
        a[j - 1] = j * (a[j - 1] - a[j]);
      }
      if (m % 2 == 0) even.push_back(a[0]);
    }
    table = std::move(even);
  }
  return table[k];
}

namespace {

Real to_real(const mpq_class& q) {
  Real r;
  mpfr_set_q(r.get(), q.get_mpq_t(), MPFR_RNDN);
  return r;
}

// c_k = B_{2k} / (2k (2k-1)) at the current precision.
const std::vector<Real>& stirling_coeffs(int count) {
  thread_local std::vector<Real> coeffs;
  thread_local mpfr_prec_t bits = 0;
  mpfr_prec_t want = mpfr_get_default_prec();
  if (bits != want) {
    coeffs.clear();
    bits = want;
  }
  while (static_cast<int>(coeffs.size()) < count) {
    int k = static_cast<int>(coeffs.size()) + 1;
    mpq_class c = bernoulli_even(k) / mpq_class(2 * k * (2 * k - 1));
    coeffs.push_back(to_real(c));
  }
  return coeffs;
}

Real reduce_mod2(const Real& x) {
  Real m = round(x / 2) * 2;
  return x - m;
}

Complex stirling(const Complex& z) {
  int d = current_digits();
  Complex lz = log(z);
  Complex result = (z - 0.5) * lz - z;
  result.re += log2pi() / 2;
  Complex inv = Complex(1) / z;
  Complex inv2 = inv * inv;
  Complex pw = inv;
  Real scale = abs(result) + 1;
  Real eps = pow10(-(d + 2)) * scale;
  int kmax = 4 * d + 40;
  Real prev_mag;
  for (int k = 1; k <= kmax; ++k) {
    const auto& c = stirling_coeffs(k);
    Complex term = pw * c[k - 1];
    Real mag = abs(term);
    result += term;
    if (mag < eps) return result;
    if (k > 2 && mag > prev_mag) break;
    prev_mag = mag;
    pw = pw * inv2;
  }
  fail(ErrorCode::convergence, "log_gamma: Stirling series did not reach working precision at |z| = " +
                                   abs(z).str(6));
}

Complex log_gamma_right(const Complex& z) {
  // Re z >= 1/2 and Im z >= 0
  int d = current_digits();
  double R = 0.37 * (d + 4) + 4;
  double x = z.re.to_double();
  double y = z.im.to_double();
  if (x * x + y * y >= R * R) return stirling(z);
  long n = 0;
  if (std::fabs(y) < R) n = static_cast<long>(std::ceil(std::sqrt(R * R - y * y) - x));
  if (n < 1) n = 1;
  Complex prod = z;
  double arg_sum = std::atan2(y, x);
  for (long j = 1; j < n; ++j) {
    Complex zj = z + j;
    prod = prod * zj;
    arg_sum += std::atan2(y, x + static_cast<double>(j));
  }
  Complex lg = stirling(z + n);
  Complex lp = log(prod);
  // arg of the product differs from the sum of args by a multiple of 2 pi
  double twopi = 2 * M_PI;
  double k = std::round((arg_sum - lp.im.to_double()) / twopi);
  lp.im += pi() * (2 * static_cast<long>(k));
  return lg - lp;
}

}  // namespace

Complex sin_pi(const Complex& z) {
  Real r = reduce_mod2(z.re);
  Real s, c;
  sin_cos(s, c, r * pi());
  Real py = z.im * pi();
  return {s * cosh(py), c * sinh(py)};
}

Complex cos_pi(const Complex& z) {
  Real r = reduce_mod2(z.re);
  Real s, c;
  sin_cos(s, c, r * pi());
  Real py = z.im * pi();
  return {c * cosh(py), -(s * sinh(py))};
}

Complex log_gamma(const Complex& z) {
  if (!z.is_finite()) fail(ErrorCode::domain, "log_gamma: non-finite argument");
  if (abs(z) > 1e8) fail(ErrorCode::domain, "log_gamma: |z| above 1e8 is outside the supported range");
  int d = current_digits();
  Real tiny = pow10(-d);
  if (abs(z.im) < tiny && z.re <= 0.5) {
    Real dist = abs(z.re - round(z.re));
    if (z.re < 0.5 && dist < tiny && round(z.re) <= 0.0) {
      fail(ErrorCode::pole, "log_gamma: pole at nonpositive integer " + round(z.re).str(6));
    }
  }
  if (z.im.sign() < 0) return conj(log_gamma(conj(z)));
  if (z.re >= 0.5) return log_gamma_right(z);

  // Reflection with Im z >= 0:
  // log sin(pi z) = -i pi z + log(1 - e^{2 pi i z}) + i pi/2 - log 2
  // and 1 - e^{2 pi i z} = -2i e^{i pi r} sin(pi r), r = z mod 2.
  Complex r(reduce_mod2(z.re), z.im);
  Complex e = exp(times_i(r * pi()));
  Complex one_minus_w = times_i(e * sin_pi(r)) * -2L;
  Complex log_sin = times_i(z * pi()) * -1L + log(one_minus_w);
  log_sin.im += pi() / 2;
  log_sin.re -= log(Real(2));
  Complex result = Complex(log(pi())) - log_sin - log_gamma_right(Complex(1) - z);
  return result;
}

Real log_gamma(const Real& x) {
  if (x.sign() > 0) return lngamma(x);
  return log_gamma(Complex(x)).re;
}

}  // namespace wml
