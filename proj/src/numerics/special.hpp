#pragma once

#include "numerics/complex.hpp"

#include <gmpxx.h>

namespace wml {

// All functions work at the calling thread's current MPFR precision.

// Principal branch of log Gamma(z).
Complex log_gamma(const Complex& z);
Real log_gamma(const Real& x);

// J_nu(x) for nu >= 0, x > 0.
Real bessel_j(const Real& order, const Real& x);

// Riemann zeta by Euler-Maclaurin summation.
Complex zeta(const Complex& s);

// B_{2k} as an exact rational; cached.
const mpq_class& bernoulli_even(int k);

// Pi-multiples helpers with exact reduction of the real part modulo 2.
Complex sin_pi(const Complex& z);
Complex cos_pi(const Complex& z);

}  // namespace wml
