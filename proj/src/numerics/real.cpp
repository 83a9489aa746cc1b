#include "numerics/complex.hpp"

#include <memory>
#include <vector>

namespace wml {

std::string Real::str(int digits, char fmt) const {
  char spec[16];
  std::snprintf(spec, sizeof spec, "%%.%dR%c", digits > 0 ? digits : 20, fmt);
  char* out = nullptr;
  mpfr_asprintf(&out, spec, v_);
  std::string s(out ? out : "nan");
  mpfr_free_str(out);
  return s;
}

namespace {

// Constants are cached per thread at the largest precision seen so far.
struct ConstCache {
  Real value;
  mpfr_prec_t bits = 0;
};

template <typename F>
Real cached(ConstCache& c, F&& compute) {
  mpfr_prec_t want = mpfr_get_default_prec();
  if (c.bits < want) {
    c.value = compute();
    c.bits = want;
  }
  Real r;
  mpfr_set(r.get(), c.value.get(), MPFR_RNDN);
  return r;
}

}  // namespace

Real pi() {
  thread_local ConstCache c;
  return cached(c, [] { Real r; mpfr_const_pi(r.get(), MPFR_RNDN); return r; });
}

Real log2pi() {
  thread_local ConstCache c;
  return cached(c, [] { return log(pi() * 2); });
}

Real euler_gamma() {
  thread_local ConstCache c;
  return cached(c, [] { Real r; mpfr_const_euler(r.get(), MPFR_RNDN); return r; });
}

Real pow10(long e) {
  Real r(10);
  mpfr_pow_si(r.get(), r.get(), e, MPFR_RNDN);
  return r;
}

Real epsilon_digits(int digits) { return pow10(-digits); }

Complex operator/(const Complex& a, const Complex& b) {
  Real d = norm(b);
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}

Complex cis(const Real& theta) {
  Complex z;
  sin_cos(z.im, z.re, theta);
  return z;
}

Complex polar(const Real& r, const Real& theta) {
  Complex z = cis(theta);
  z.re *= r;
  z.im *= r;
  return z;
}

Complex exp(const Complex& z) { return polar(exp(z.re), z.im); }

Complex log(const Complex& z) { return {log(abs(z)), arg(z)}; }

Complex sqrt(const Complex& z) {
  Real r = sqrt(abs(z));
  return polar(r, arg(z) / 2);
}

Complex sin(const Complex& z) {
  Real s, c;
  sin_cos(s, c, z.re);
  return {s * cosh(z.im), c * sinh(z.im)};
}

Complex cos(const Complex& z) {
  Real s, c;
  sin_cos(s, c, z.re);
  return {c * cosh(z.im), -(s * sinh(z.im))};
}

Complex pow(const Real& x, const Complex& z) {
  Real lx = log(x);
  return polar(exp(z.re * lx), z.im * lx);
}

Complex pow(const Complex& z, long n) {
  Complex result(1);
  Complex base = z;
  bool inv = n < 0;
  unsigned long m = inv ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
  while (m) {
    if (m & 1) result = result * base;
    base = base * base;
    m >>= 1;
  }
  return inv ? Complex(1) / result : result;
}

std::string to_string(const Complex& z, int digits) {
  return z.re.str(digits) + (z.im.sign() < 0 ? " - " : " + ") + abs(z.im).str(digits) + "i";
}

}  // namespace wml
