#pragma once

#include "numerics/real.hpp"

namespace wml {

struct Complex {
  Real re;
  Real im;

  Complex() = default;
  Complex(Real r) : re(std::move(r)) {}
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  Complex(double r) : re(r) {}
  Complex(double r, double i) : re(r), im(i) {}
  Complex(int r) : re(r) {}
  Complex(long r) : re(r) {}

  bool is_finite() const { return re.is_finite() && im.is_finite(); }

  Complex& operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
  Complex& operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }
  Complex& operator*=(const Complex& o);
  Complex& operator*=(const Real& o) { re *= o; im *= o; return *this; }
  Complex& operator/=(const Real& o) { re /= o; im /= o; return *this; }
  Complex operator-() const { return {-re, -im}; }
};

inline Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
inline Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
inline Complex operator*(const Complex& a, const Complex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline Complex operator*(const Complex& a, const Real& b) { return {a.re * b, a.im * b}; }
inline Complex operator*(const Real& b, const Complex& a) { return {a.re * b, a.im * b}; }
inline Complex operator*(const Complex& a, long b) { return {a.re * b, a.im * b}; }
inline Complex operator*(const Complex& a, double b) { return {a.re * b, a.im * b}; }
inline Complex operator/(const Complex& a, const Real& b) { return {a.re / b, a.im / b}; }
inline Complex operator/(const Complex& a, long b) { return {a.re / b, a.im / b}; }
Complex operator/(const Complex& a, const Complex& b);
inline Complex operator+(const Complex& a, const Real& b) { return {a.re + b, a.im}; }
inline Complex operator-(const Complex& a, const Real& b) { return {a.re - b, a.im}; }
inline Complex operator+(const Complex& a, double b) { return {a.re + b, a.im}; }
inline Complex operator-(const Complex& a, double b) { return {a.re - b, a.im}; }
inline Complex operator+(const Complex& a, long b) { return {a.re + b, a.im}; }
inline Complex operator-(const Complex& a, long b) { return {a.re - b, a.im}; }
inline Complex& Complex::operator*=(const Complex& o) { *this = *this * o; return *this; }

inline Complex conj(const Complex& z) { return {z.re, -z.im}; }
inline Real abs(const Complex& z) { return hypot(z.re, z.im); }
inline Real norm(const Complex& z) { return z.re * z.re + z.im * z.im; }
inline Real arg(const Complex& z) { return atan2(z.im, z.re); }
inline Complex times_i(const Complex& z) { return {-z.im, z.re}; }

Complex exp(const Complex& z);
Complex log(const Complex& z);
Complex sqrt(const Complex& z);
Complex sin(const Complex& z);
Complex cos(const Complex& z);
// x^z for real x > 0
Complex pow(const Real& x, const Complex& z);
Complex pow(const Complex& z, long n);
// e^{i theta}
Complex cis(const Real& theta);
Complex polar(const Real& r, const Real& theta);

std::string to_string(const Complex& z, int digits = 20);

}  // namespace wml
