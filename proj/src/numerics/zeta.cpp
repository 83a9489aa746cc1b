#include "numerics/errors.hpp"
#include "numerics/special.hpp"

#include <cmath>
#include <vector>

namespace wml {

namespace {

Real to_real(const mpq_class& q) {
  Real r;
  mpfr_set_q(r.get(), q.get_mpq_t(), MPFR_RNDN);
  return r;
}

// B_{2k} / (2k)! at the current precision.
const std::vector<Real>& em_coeffs(int count) {
  thread_local std::vector<Real> coeffs;
  thread_local mpfr_prec_t bits = 0;
  mpfr_prec_t want = mpfr_get_default_prec();
  if (bits != want) {
    coeffs.clear();
    bits = want;
  }
  while (static_cast<int>(coeffs.size()) < count) {
    int k = static_cast<int>(coeffs.size()) + 1;
    mpz_class fact;
    mpz_fac_ui(fact.get_mpz_t(), 2 * k);
    coeffs.push_back(to_real(bernoulli_even(k) / mpq_class(fact)));
  }
  return coeffs;
}

}  // namespace

Complex zeta(const Complex& s) {
  if (!s.is_finite()) fail(ErrorCode::domain, "zeta: non-finite argument");
  int d = current_digits();
  Complex sm1 = s - 1L;
  if (abs(sm1) < pow10(-d)) fail(ErrorCode::pole, "zeta: pole at s = 1");

  double abs_s = abs(s).to_double();
  double ims = std::fabs(s.im.to_double());
  double floor_n = ((d + 10) * std::log(10.0) + abs_s) / (2 * M_PI) + 1;
  long N = static_cast<long>(std::ceil(std::max({20.0, 2 * ims, floor_n})));

  Complex sum;
  for (long n = 1; n < N; ++n) {
    sum += pow(Real(n), -s);
  }
  Real rn(N);
  Complex n_ms = pow(rn, -s);
  sum += n_ms * rn / sm1;
  sum += n_ms / 2L;

  // Tail: sum_k B_{2k}/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
  Real eps = pow10(-(d + 2)) * (abs(sum) + pow10(-d));
  Complex rising = s;
  Complex pw = n_ms / rn;
  Real inv_n2 = 1 / (rn * rn);
  int kmax = 4 * d + 40;
  for (int k = 1; k <= kmax; ++k) {
    const auto& c = em_coeffs(k);
    Complex term = rising * pw * c[k - 1];
    sum += term;
    if (abs(term) < eps) return sum;
    rising = rising * (s + static_cast<long>(2 * k - 1)) * (s + static_cast<long>(2 * k));
    pw = pw * inv_n2;
  }
  fail(ErrorCode::convergence, "zeta: Euler-Maclaurin tail did not converge at s = " + to_string(s, 10));
}

}  // namespace wml
