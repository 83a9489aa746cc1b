#pragma once

#include "hecke/hecke.hpp"
#include "kernels/kernels.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wml {

// Exponent towards the Selberg eigenvalue conjecture used in the density ranges.
inline constexpr double selberg_theta = 7.0 / 64;

struct SpectralDatum {
  double t = 0;            // spectral parameter t_f
  double weighted_L4 = 0;  // L(1/2, f)^4 / L(1, ad f)
  double err = 0;          // absolute uncertainty of weighted_L4
};

struct SpectralDataset {
  std::vector<SpectralDatum> rows;  // strictly increasing t
  std::string source_label;
  double t_max = 0;  // last t, or 0 when empty
};

// CSV v1: first line "#maass-spectral v1"; optional "# source: <label>" and other '#'
// comment lines; optional column line "t_f,weighted_L4,err"; then data rows. LF only.
SpectralDataset parse_spectral_data(std::istream& in, const std::string& name = "<stream>");
SpectralDataset load_spectral_data(const std::string& path);
std::string format_spectral_data(const SpectralDataset& ds);

struct TermValue {
  Real value;
  Real budget;
};

struct EisensteinDetail {
  TermValue term;
  double t_cap = 0;
  int nodes = 0;             // transform evaluations
  Real interpolation_error;  // largest trailing-coefficient estimate over the panels
  Real tail;                 // bound for t in [t_cap, 2 t_cap]
  std::vector<TransformValue> samples;  // h~ on the interpolation nodes and on [t_cap, 2 t_cap]
};

// (1/2 pi) int |zeta(1/2 + it)^4 / zeta(1 + 2it)|^2 h~(t) dt for the plus or minus transform.
// h~ is interpolated on [0, t_cap] by Chebyshev-Lobatto panels of the given degree,
// starting at `panel_width` and halved until each panel resolves h~ to 1e-8 of its maximum.
EisensteinDetail eisenstein_term(KernelVariant v, const TestFunctionParams& p, const TransformConfig& tc, double t_cap,
                                 int degree = 16, double panel_width = 2);

// sum of weighted_L4 h+(t_f); the budget carries the data errors and the minus channel.
TermValue maass_term(const TestFunctionParams& p, const SpectralDataset& ds, const TransformConfig& tc);
TermValue maass_term(const SpectralDataset& ds, const TransformGrid& plus, const TransformGrid& minus);

struct ReportOptions {
  double t_cap = 0;           // 0 selects 2 K log K / L
  long k_cap = 120;           // last weight in the dual holomorphic sum
  double tail_mass = 1;       // declared bound on the weighted L^4 mass above t_max
  double main_radius = 0.01;
  int main_nodes = 64;
  int chebyshev_degree = 16;
  double panel_width = 2;
  int jobs = 1;
};

// Results that do not depend on the truncation caps and can be shared between reports.
struct ReportCache {
  std::optional<MomentTable> moments;
  std::optional<MainTermResult> main_term;
};

struct ReportBudgets {
  double lhs_holomorphic = 0;
  double rhs_maass_plus = 0;
  double rhs_eisenstein_plus = 0;
  double rhs_holomorphic_dual = 0;
  double rhs_main_term = 0;
  double maass_tail_budget = 0;
};

struct ReciprocityReport {
  double lhs_holomorphic = 0;
  double rhs_maass_plus = 0;
  double rhs_eisenstein_plus = 0;
  double rhs_holomorphic_dual = 0;
  double rhs_main_term = 0;
  ReportBudgets budgets;
  double residual = 0;
  std::vector<std::string> assumptions;

  long K = 0, L = 0;
  int digits = 0;
  double t_cap = 0;
  long k_cap = 0;
  std::string source_label;
  std::size_t spectral_rows = 0;

  std::string to_json() const;
};

// lhs - (maass + eisenstein + dual + main) in double arithmetic, in that order.
double report_residual(double lhs, double maass, double eisenstein, double dual, double main);

ReciprocityReport reciprocity_report(const TestFunctionParams& p, const SpectralDataset& ds, const TransformConfig& tc,
                                     const ReportOptions& opt = {}, ReportCache* cache = nullptr);

struct DyadicStats {
  long T = 0;
  double V = 0;
  Real S;       // sum of M(k)^2 over T <= k <= 2T with M(k) >= V
  Real S_star;  // same with V <= M(k) <= 2V
};

DyadicStats dyadic_stats(const MomentTable& table, long T, double V);

// Range (1..4) of the large-value density estimate that applies to V at size T.
int density_range(long T, double V);

}  // namespace wml
