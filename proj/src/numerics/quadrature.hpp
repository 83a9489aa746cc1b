#pragma once

#include "numerics/complex.hpp"
#include "numerics/precision.hpp"

#include <functional>
#include <vector>

namespace wml {

struct QuadResult {
  Complex value;
  Real error;  // estimated absolute error
  Real mass;   // estimate of the integral of |f|
  long evaluations = 0;
  long panels = 0;
};

struct QuadOptions {
  std::vector<double> breakpoints;  // initial panel edges inside (a, b)
  int order = 20;                   // Gauss-Legendre points per panel
  long max_panels = 40000;
  double abs_floor = 0;             // absolute error target floor; 0 means tail_threshold
};

using LineFunction = std::function<Complex(const Real& x)>;
using VerticalFunction = std::function<Complex(const Complex& s)>;

// Vector-valued integrand: writes `dim` components into out.
using MultiLineFunction = std::function<void(const Real& x, std::vector<Complex>& out)>;

struct MultiQuadResult {
  std::vector<Complex> value;
  std::vector<Real> error;
  std::vector<Real> mass;
  long evaluations = 0;
  long panels = 0;
};

// Adaptive integral of every component over [a, b] on a shared panel set; each
// component must meet its own tolerance.
MultiQuadResult quad_line_multi(const MultiLineFunction& g, std::size_t dim, const Real& a, const Real& b,
                                const PrecisionConfig& cfg, const QuadOptions& opt = {});

// Adaptive integral of g over [a, b].
QuadResult quad_line(const LineFunction& g, const Real& a, const Real& b, const PrecisionConfig& cfg,
                     const QuadOptions& opt = {});

// Integral of f(s) ds along s = sigma + i tau, tau in [tau_lo, tau_hi]; includes the factor i.
QuadResult quad_vertical(const VerticalFunction& f, const Real& sigma, const Real& tau_lo, const Real& tau_hi,
                         const PrecisionConfig& cfg, const QuadOptions& opt = {});

// (1/2 pi i) times the contour integral of f(z) dz over |z - center| = radius,
// trapezoidal rule on `nodes` equispaced points (offset by half a step).
Complex quad_circle(const std::function<Complex(const Complex&)>& f, const Complex& center, const Real& radius,
                    int nodes);

// Gauss-Legendre nodes and weights on [-1, 1] at the current precision.
struct GaussRule {
  std::vector<Real> x;
  std::vector<Real> w;
};
const GaussRule& gauss_legendre(int n);

// Geometric panel edges: uniform width `h` up to `knee`, then growing by `ratio` up to `end`.
std::vector<double> graded_edges(double start, double knee, double end, double h, double ratio);

}  // namespace wml
