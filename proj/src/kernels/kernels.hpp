#pragma once

#include "numerics/complex.hpp"
#include "numerics/precision.hpp"
#include "testfn/testfn.hpp"

#include <string>
#include <vector>

namespace wml {

enum class KernelVariant { plus, minus, hol };

std::string variant_name(KernelVariant v);
KernelVariant parse_variant(const std::string& name);

// Mellin-Barnes kernel at s; `arg` is the spectral parameter t (plus, minus) or the weight k (hol).
Complex kernel_eval(KernelVariant v, const Complex& s, double arg);
Complex log_kernel(KernelVariant v, const Complex& s, double arg);

struct TransformConfig {
  double sigma = 0.5;
  double tau_max = 0;  // 0 selects the truncation from the measured tail decay
  PrecisionConfig cfg;
  int order = 48;      // Gauss-Legendre points per panel
  bool fold = true;    // integrate tau >= 0 and use conjugate symmetry of the integrand

  void validate() const;
};

struct TransformValue {
  double arg = 0;
  Complex value;
  Real error;  // quadrature estimate plus tail bound
};

struct TransformGrid {
  KernelVariant variant = KernelVariant::plus;
  std::vector<TransformValue> rows;
  double tau_max = 0;
  long evaluations = 0;
};

// One shared quadrature for every argument on the grid.
TransformGrid transform_grid(KernelVariant v, const std::vector<double>& args, const TestFunctionParams& p,
                             const TransformConfig& tc);
TransformValue transform_eval(KernelVariant v, double arg, const TestFunctionParams& p, const TransformConfig& tc);

struct StationaryPointResult {
  double t = 0;
  double y_located = 0;
  double y_predicted = 0;
  double rel_deviation = 0;
  double window_lo = 0, window_hi = 0;
  bool window_extended = false;  // the sign change lay above t^3/K^1.8
  int grid_points = 0;
};

// Positive root of K^2 y (y + 4t) = (2t + y)^4.
double stationary_root(double t, double K);

StationaryPointResult locate_stationary_point(double t, const TestFunctionParams& p, const TransformConfig& tc);

// Smooth bump: 1 on [1, 2], supported on (1/2, 5/2).
double omega_bump(double x);

struct OscillationResult {
  Complex value;
  Real budget;
  int terms = 0;  // number of K with omega(K/T) != 0
};

// sum over even K of omega(K/T) h+(t1; K, L) conj(h+(t2; K, L))
OscillationResult oscillation_sum(double t1, double t2, long T, long L, const TransformConfig& tc, int jobs = 1);

struct MainTermResult {
  Complex value;
  double radius = 0;
  int nodes = 0;
  double stability = 0;  // |value - value at half radius|
  Real quad_error;
};

// Abscissa of the vertical line used at radius r: clear of every pole on the circle.
double main_term_abscissa(double radius);

// Main term at a single point z. `abscissa` <= 0 selects main_term_abscissa(|z|); the
// value does not depend on it.
Complex main_term_at(const Complex& z, const TestFunctionParams& p, const TransformConfig& tc, Real* error = nullptr,
                     double abscissa = 0);

// Cauchy average of the main term over |z| = radius; when `check_stability` is set the
// half radius is evaluated as well.
MainTermResult main_term_limit(const TestFunctionParams& p, double radius, int nodes, const TransformConfig& tc,
                               int jobs = 1, bool check_stability = true);

}  // namespace wml
