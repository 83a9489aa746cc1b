#pragma once

#include "numerics/precision.hpp"

#include <gmpxx.h>

#include <vector>

namespace wml {

// Dimension of the space of level-one cusp forms of weight k.
long dim_cusp_forms(long k);

// q-expansion coefficients a(0..N) with exact integers.
using QSeries = std::vector<mpz_class>;

// Echelonized integral basis of S_k: row i has a_i(j) = delta_ij for 1 <= i, j <= dim.
std::vector<QSeries> miller_basis(long k, long N);

struct HeckeForm {
  long k = 0;
  long N = 0;
  int root_number = 1;          // i^k as a sign
  std::vector<Real> lambda;     // lambda[n] for 1 <= n <= N, analytic normalization; lambda[0] = 0
  long hecke_prime = 2;         // prime whose Hecke operator separated the eigenvalues
  double hecke_defect = 0;      // max |lambda from recursion - lambda from the expansion| over n <= N
};

// Default q-expansion length for weight k.
inline long default_length(long k) { return 30 * k; }

// Normalized Hecke eigenforms of weight k, ordered by lambda(2).
std::vector<HeckeForm> eigenforms(long k, long N, const PrecisionConfig& cfg);

enum class AfeKernel {
  incomplete_gamma,  // G = 1: V is the regularized upper incomplete Gamma function
  gaussian,          // G(u) = exp((u / width)^2), integrated on Re u = 2, |Im u| <= 30
};

struct AfeOptions {
  AfeKernel kernel = AfeKernel::incomplete_gamma;
  double width = 1;    // Gaussian width
  double split = 1;    // y0 in the theta-integral split; the value does not depend on it
  long length = 0;     // number of terms; 0 selects the length from the decay of V
};

// Sum of the approximate functional equation for L(1/2, f), without the shortcut for odd root number.
Real central_L_sum(const HeckeForm& f, const PrecisionConfig& cfg, const AfeOptions& opt = {});

// L(1/2, f); exactly 0 when k = 2 mod 4. Compares two sum lengths and fails if they disagree.
Real central_L(const HeckeForm& f, const PrecisionConfig& cfg, const AfeOptions& opt = {});

// Smoothing weights of the symmetric-square functional equation at s = 1; they depend on k only.
struct AdjointWeights {
  long k = 0;
  long len = 0;
  std::vector<Real> w1, w0;  // W_1(n), W_0(n) for 1 <= n <= len
  Real ratio;                // gamma(0) / gamma(1)
};

// Number of terms needed at the working precision of cfg.
long default_adjoint_length(long k, const PrecisionConfig& cfg);

// len <= 0 selects default_adjoint_length.
AdjointWeights adjoint_weights(long k, long len, const PrecisionConfig& cfg);

// L(1, ad f) from the approximate functional equation of the symmetric square.
Real adjoint_L1(const HeckeForm& f, const PrecisionConfig& cfg, const AdjointWeights* weights = nullptr);

struct MomentRow {
  long k = 0;
  long dim = 0;
  std::vector<Real> central;  // L(1/2, f)
  std::vector<Real> adjoint;  // L(1, ad f)
  Real m4;                    // sum of L(1/2, f)^4 / L(1, ad f)
};

struct MomentTable {
  std::vector<MomentRow> rows;  // increasing k

  const MomentRow* find(long k) const;
};

// Rows for every even k in [k_min, k_max] with dim S_k > 0.
MomentTable moment_table(long k_min, long k_max, const PrecisionConfig& cfg, int jobs = 1);

Real fourth_moment(long k, const PrecisionConfig& cfg);

// Sum of L(1/2, f)^12 / L(1, ad f) over forms with T <= k <= 2T.
Real twelfth_moment(const MomentTable& table, long T);
Real twelfth_moment(long T, const PrecisionConfig& cfg, int jobs = 1);

// Number of forms with T <= k <= 2T and L(1/2, f) >= V.
long density_count(const MomentTable& table, long T, double V);
long density_count(long T, double V, const PrecisionConfig& cfg, int jobs = 1);

// max over the table of L(1/2, f) / (k^{1/3} (log k)^{13/6}).
double weyl_ratio(const MomentTable& table);

// max over the table of M4(k) / (k^{4/3} (log k)^{20/3}).
double fourth_moment_ratio(const MomentTable& table);

}  // namespace wml
