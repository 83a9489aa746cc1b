#pragma once

#include "numerics/complex.hpp"
#include "numerics/precision.hpp"

namespace wml::test {

inline double rel_err(const Complex& a, const Complex& b) {
  Real den = abs(b);
  if (den.is_zero()) return abs(a).to_double();
  return (abs(a - b) / den).to_double();
}

inline double rel_err(const Real& a, const Real& b) {
  if (b.is_zero()) return abs(a).to_double();
  return (abs(a - b) / abs(b)).to_double();
}

inline double abs_err(const Complex& a, const Complex& b) { return abs(a - b).to_double(); }

// log10 of a relative error, usable when the error underflows doubles.
inline double log10_rel(const Complex& a, const Complex& b) {
  Real e = abs(a - b);
  if (e.is_zero()) return -1e9;
  Real den = abs(b);
  if (!den.is_zero()) e /= den;
  return (log(e) / log(Real(10))).to_double();
}

inline Complex cplx(const char* re, const char* im) { return {Real(re), Real(im)}; }

}  // namespace wml::test
