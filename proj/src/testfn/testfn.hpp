#pragma once

#include "numerics/complex.hpp"
#include "numerics/precision.hpp"

#include <gmpxx.h>

#include <string>
#include <vector>

namespace wml {

struct TestFunctionParams {
  long K = 12;
  long L = 2;
  double delta = 1.0 / 128;

  long L2() const { return L * L; }
  void validate() const;
  // Soft range checks (K^{delta/8} <= L <= K^{1/3 - delta/8}); never fatal.
  std::vector<std::string> warnings() const;
};

// i^{-k} times a nonnegative real; exact zero outside [K - L^2, K + L^2].
Complex h_hol(long k, const TestFunctionParams& p);

// i^k h_hol(k) as a real number.
Real h_hol_weight(long k, const TestFunctionParams& p);

// Exact rational value of i^k h_hol(k) for k in the support.
mpq_class h_hol_product(long k, const TestFunctionParams& p);

// Closed form of H(x); throws ErrorCode::overflow when the value leaves the precision budget.
Real H_closed(const Real& x, const TestFunctionParams& p);

// Mellin transform of H and its logarithm.
Complex H_hat(const Complex& s, const TestFunctionParams& p);
Complex log_H_hat(const Complex& s, const TestFunctionParams& p);

// First pole of H_hat: s = L^2 - K + 1.
long H_hat_first_pole(const TestFunctionParams& p);

// 2 pi int_0^inf H(x) J_{k-1}(4 pi x) dx / x, which equals i^k h_hol(k).
Real bessel_transform_oracle(long k, const TestFunctionParams& p, const PrecisionConfig& cfg);

// int_0^inf H(x) x^{s-1} dx by direct quadrature.
Complex mellin_oracle(const Complex& s, const TestFunctionParams& p, const PrecisionConfig& cfg);

struct RegimeRow {
  double tau;
  Real abs_H_hat;
  Real bound;
  Real ratio;
  int regime;  // 1..4
};

struct RegimeBoundReport {
  double sigma = 0;
  std::vector<RegimeRow> grid;
  double fitted_gaussian_rate = 0;  // least-squares slope of -log|H_hat| against tau^2 on [K/L, K/2]
  double predicted_gaussian_rate = 0;  // (L/2K)^2
};

Real regime_bound(const TestFunctionParams& p, double sigma, double tau, int* regime = nullptr);
RegimeBoundReport regime_bound_report(const TestFunctionParams& p, double sigma, const std::vector<double>& tau_grid);

// max over L <= |k - K| <= L^2 of i^k h_hol(k) e^{(k-K)^2/(4L^2)}.
double gaussian_decay_constant(const TestFunctionParams& p);

// Deviation of log(i^k h_hol(k)) from -(K-k)^2/(2L^2) + (K-k)L^2/(2K).
double localization_deviation(long k, const TestFunctionParams& p);

// The closed form of the plus-channel transform of H carries sin(pi (K - L^2)/2),
// which vanishes identically when K - L^2 is even.
bool minus_channel_factor_vanishes(const TestFunctionParams& p);

}  // namespace wml
