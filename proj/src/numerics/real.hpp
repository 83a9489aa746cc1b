#pragma once

#include <mpfr.h>

#include <climits>
#include <cmath>
#include <string>
#include <utility>

namespace wml {

// Precision is taken from MPFR's per-thread default at construction time.
class Real {
public:
  Real() { mpfr_init(v_); mpfr_set_zero(v_, 1); }
  Real(int x) { mpfr_init(v_); mpfr_set_si(v_, x, MPFR_RNDN); }
  Real(long x) { mpfr_init(v_); mpfr_set_si(v_, x, MPFR_RNDN); }
  Real(long long x) { mpfr_init(v_); mpfr_set_si(v_, static_cast<long>(x), MPFR_RNDN); }
  Real(unsigned long x) { mpfr_init(v_); mpfr_set_ui(v_, x, MPFR_RNDN); }
  Real(double x) { mpfr_init(v_); mpfr_set_d(v_, x, MPFR_RNDN); }
  explicit Real(const char* s) { mpfr_init(v_); mpfr_set_str(v_, s, 10, MPFR_RNDN); }
  explicit Real(const std::string& s) : Real(s.c_str()) {}
  explicit Real(mpfr_srcptr x) { mpfr_init2(v_, mpfr_get_prec(x)); mpfr_set(v_, x, MPFR_RNDN); }

  Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Real(Real&& o) noexcept {
    *v_ = *o.v_;
    o.v_->_mpfr_d = nullptr;
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      ensure();
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    if (!o.v_->_mpfr_d) {
      ensure();
      mpfr_set_zero(v_, 1);
    } else {
      std::swap(*v_, *o.v_);
    }
    return *this;
  }
  ~Real() {
    if (v_->_mpfr_d) mpfr_clear(v_);
  }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }
  std::string str(int digits = 0, char fmt = 'e') const;

  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  long exponent() const { return mpfr_zero_p(v_) ? LONG_MIN / 2 : mpfr_get_exp(v_); }

  Real& operator+=(const Real& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator-=(const Real& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator*=(const Real& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator/=(const Real& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator*=(long o) { mpfr_mul_si(v_, v_, o, MPFR_RNDN); return *this; }
  Real& operator/=(long o) { mpfr_div_si(v_, v_, o, MPFR_RNDN); return *this; }
  Real& operator+=(long o) { mpfr_add_si(v_, v_, o, MPFR_RNDN); return *this; }
  Real& operator-=(long o) { mpfr_sub_si(v_, v_, o, MPFR_RNDN); return *this; }

  Real operator-() const { Real r; mpfr_neg(r.v_, v_, MPFR_RNDN); return r; }

private:
  void ensure() {
    if (!v_->_mpfr_d) mpfr_init(v_);
  }
  mpfr_t v_;
};

inline Real operator+(const Real& a, const Real& b) { Real r; mpfr_add(r.get(), a.get(), b.get(), MPFR_RNDN); return r; }
inline Real operator-(const Real& a, const Real& b) { Real r; mpfr_sub(r.get(), a.get(), b.get(), MPFR_RNDN); return r; }
inline Real operator*(const Real& a, const Real& b) { Real r; mpfr_mul(r.get(), a.get(), b.get(), MPFR_RNDN); return r; }
inline Real operator/(const Real& a, const Real& b) { Real r; mpfr_div(r.get(), a.get(), b.get(), MPFR_RNDN); return r; }
inline Real operator+(const Real& a, long b) { Real r; mpfr_add_si(r.get(), a.get(), b, MPFR_RNDN); return r; }
inline Real operator-(const Real& a, long b) { Real r; mpfr_sub_si(r.get(), a.get(), b, MPFR_RNDN); return r; }
inline Real operator*(const Real& a, long b) { Real r; mpfr_mul_si(r.get(), a.get(), b, MPFR_RNDN); return r; }
inline Real operator/(const Real& a, long b) { Real r; mpfr_div_si(r.get(), a.get(), b, MPFR_RNDN); return r; }
inline Real operator+(long a, const Real& b) { return b + a; }
inline Real operator-(long a, const Real& b) { Real r; mpfr_si_sub(r.get(), a, b.get(), MPFR_RNDN); return r; }
inline Real operator*(long a, const Real& b) { return b * a; }
inline Real operator/(long a, const Real& b) { Real r; mpfr_si_div(r.get(), a, b.get(), MPFR_RNDN); return r; }
inline Real operator+(const Real& a, int b) { return a + static_cast<long>(b); }
inline Real operator-(const Real& a, int b) { return a - static_cast<long>(b); }
inline Real operator*(const Real& a, int b) { return a * static_cast<long>(b); }
inline Real operator/(const Real& a, int b) { return a / static_cast<long>(b); }
inline Real operator+(int a, const Real& b) { return b + static_cast<long>(a); }
inline Real operator-(int a, const Real& b) { return static_cast<long>(a) - b; }
inline Real operator*(int a, const Real& b) { return b * static_cast<long>(a); }
inline Real operator/(int a, const Real& b) { return static_cast<long>(a) / b; }
inline Real operator+(const Real& a, double b) { Real r; mpfr_add_d(r.get(), a.get(), b, MPFR_RNDN); return r; }
inline Real operator-(const Real& a, double b) { Real r; mpfr_sub_d(r.get(), a.get(), b, MPFR_RNDN); return r; }
inline Real operator*(const Real& a, double b) { Real r; mpfr_mul_d(r.get(), a.get(), b, MPFR_RNDN); return r; }
inline Real operator/(const Real& a, double b) { Real r; mpfr_div_d(r.get(), a.get(), b, MPFR_RNDN); return r; }
inline Real operator+(double a, const Real& b) { return b + a; }
inline Real operator-(double a, const Real& b) { Real r; mpfr_d_sub(r.get(), a, b.get(), MPFR_RNDN); return r; }
inline Real operator*(double a, const Real& b) { return b * a; }
inline Real operator/(double a, const Real& b) { Real r; mpfr_d_div(r.get(), a, b.get(), MPFR_RNDN); return r; }

inline bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.get(), b.get()); }
inline bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.get(), b.get()); }
inline bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.get(), b.get()); }
inline bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.get(), b.get()); }
inline bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.get(), b.get()); }
inline bool operator!=(const Real& a, const Real& b) { return !mpfr_equal_p(a.get(), b.get()); }
inline bool operator<(const Real& a, double b) { return mpfr_cmp_d(a.get(), b) < 0; }
inline bool operator>(const Real& a, double b) { return mpfr_cmp_d(a.get(), b) > 0; }
inline bool operator<=(const Real& a, double b) { return mpfr_cmp_d(a.get(), b) <= 0; }
inline bool operator>=(const Real& a, double b) { return mpfr_cmp_d(a.get(), b) >= 0; }

#define WML_REAL_FN1(name, call)                 \
  inline Real name(const Real& x) {              \
    Real r;                                      \
    call(r.get(), x.get(), MPFR_RNDN);           \
    return r;                                    \
  }
WML_REAL_FN1(exp, mpfr_exp)
WML_REAL_FN1(log, mpfr_log)
WML_REAL_FN1(log1p, mpfr_log1p)
WML_REAL_FN1(expm1, mpfr_expm1)
WML_REAL_FN1(sqrt, mpfr_sqrt)
WML_REAL_FN1(sin, mpfr_sin)
WML_REAL_FN1(cos, mpfr_cos)
WML_REAL_FN1(tan, mpfr_tan)
WML_REAL_FN1(atan, mpfr_atan)
WML_REAL_FN1(sinh, mpfr_sinh)
WML_REAL_FN1(cosh, mpfr_cosh)
WML_REAL_FN1(abs, mpfr_abs)
WML_REAL_FN1(lngamma, mpfr_lngamma)
WML_REAL_FN1(gamma, mpfr_gamma)
WML_REAL_FN1(sqr, mpfr_sqr)
#undef WML_REAL_FN1

inline Real floor(const Real& x) { Real r; mpfr_floor(r.get(), x.get()); return r; }
inline Real round(const Real& x) { Real r; mpfr_round(r.get(), x.get()); return r; }
inline Real atan2(const Real& y, const Real& x) { Real r; mpfr_atan2(r.get(), y.get(), x.get(), MPFR_RNDN); return r; }
inline Real hypot(const Real& x, const Real& y) { Real r; mpfr_hypot(r.get(), x.get(), y.get(), MPFR_RNDN); return r; }
inline Real pow(const Real& x, const Real& y) { Real r; mpfr_pow(r.get(), x.get(), y.get(), MPFR_RNDN); return r; }
inline Real pow(const Real& x, long n) { Real r; mpfr_pow_si(r.get(), x.get(), n, MPFR_RNDN); return r; }
inline Real ldexp(const Real& x, long e) { Real r; mpfr_mul_2si(r.get(), x.get(), e, MPFR_RNDN); return r; }
inline void sin_cos(Real& s, Real& c, const Real& x) { mpfr_sin_cos(s.get(), c.get(), x.get(), MPFR_RNDN); }
inline Real max(const Real& a, const Real& b) { return a < b ? b : a; }
inline Real min(const Real& a, const Real& b) { return a < b ? a : b; }

Real pi();
Real log2pi();
Real euler_gamma();
// Smallest x with |x| treated as zero for a relative target of `digits` digits.
Real epsilon_digits(int digits);
Real pow10(long e);

// Per-thread working precision guard.
class PrecisionScope {
public:
  explicit PrecisionScope(mpfr_prec_t bits) : saved_(mpfr_get_default_prec()) { mpfr_set_default_prec(bits); }
  ~PrecisionScope() { mpfr_set_default_prec(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
  mpfr_prec_t saved_;
};

inline mpfr_prec_t digits_to_bits(int digits) {
  return static_cast<mpfr_prec_t>(std::ceil(digits * 3.321928094887362)) + 8;
}
inline int current_digits() {
  return static_cast<int>((mpfr_get_default_prec() - 8) / 3.321928094887362);
}

}  // namespace wml
