#include "doctest.h"
#include "hecke/hecke.hpp"
#include "numerics/errors.hpp"
#include "support.hpp"

#include <cmath>
#include <numeric>

using namespace wml;
using wml::test::rel_err;

namespace {

PrecisionConfig cfg30() { return PrecisionConfig::with_digits(30); }

// q * prod (1 - q^n)^24 up to q^N, by repeated multiplication with (1 - q^n).
std::vector<mpz_class> discriminant_product(long N) {
  std::vector<mpz_class> a(N + 1);
  a[1] = 1;
  for (long n = 1; n < N; ++n) {
    for (int rep = 0; rep < 24; ++rep) {
      for (long j = N; j >= n + 1; --j) a[j] -= a[j - n];
    }
  }
  return a;
}

long sigma3(long n) {
  long s = 0;
  for (long d = 1; d <= n; ++d) {
    if (n % d == 0) s += d * d * d;
  }
  return s;
}

// L(1/2, Delta) from the theta integral 2 (2 pi)^6 / 5! * int_1^inf Delta(iy) y^5 dy,
// composite Simpson in long double.
long double theta_integral_weight12() {
  auto tau = discriminant_product(60);
  const long double two_pi = 2 * 3.14159265358979323846264338327950288L;
  auto f = [&](long double y) {
    long double s = 0;
    for (long n = 1; n <= 60; ++n) s += tau[n].get_d() * std::exp(-two_pi * n * y);
    return s * std::pow(y, 5.0L);
  };
  const long double a = 1, b = 14;
  const long steps = 20000;
  long double h = (b - a) / steps, s = f(a) + f(b);
  for (long i = 1; i < steps; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  long double integral = s * h / 3;
  return 2 * std::pow(two_pi, 6.0L) / 120 * integral;
}

}  // namespace

TEST_CASE("dimensions of cusp form spaces") {
  CHECK(dim_cusp_forms(12) == 1);
  CHECK(dim_cusp_forms(26) == 1);
  CHECK(dim_cusp_forms(24) == 2);
  CHECK(dim_cusp_forms(14) == 0);
  CHECK(dim_cusp_forms(10) == 0);
  CHECK(dim_cusp_forms(38) == 2);
  CHECK(dim_cusp_forms(100) == 8);
  // generating function 1 / ((1 - x^4)(1 - x^6)) shifted by weight 12
  for (long k = 12; k <= 100; k += 2) {
    long count = 0;
    for (long a = 0; 4 * a <= k - 12; ++a) count += (k - 12 - 4 * a) % 6 == 0;
    CHECK(dim_cusp_forms(k) == count);
  }
}

TEST_CASE("Miller basis: discriminant coefficients and echelon form") {
  const long N = 40;
  auto delta = discriminant_product(N);
  auto b = miller_basis(12, N);
  REQUIRE(b.size() == 1);
  for (long n = 0; n <= N; ++n) CHECK(b[0][n] == delta[n]);
  CHECK(b[0][2] == -24);

  // weight 16: Delta * E4
  std::vector<mpz_class> e4(N + 1), f16(N + 1);
  e4[0] = 1;
  for (long n = 1; n <= N; ++n) e4[n] = 240 * sigma3(n);
  for (long i = 0; i <= N; ++i) {
    for (long j = 0; i + j <= N; ++j) f16[i + j] += delta[i] * e4[j];
  }
  auto b16 = miller_basis(16, N);
  REQUIRE(b16.size() == 1);
  for (long n = 0; n <= N; ++n) CHECK(b16[0][n] == f16[n]);

  for (long k : {24L, 48L, 100L}) {
    auto m = miller_basis(k, 2 * dim_cusp_forms(k) + 2);
    REQUIRE(long(m.size()) == dim_cusp_forms(k));
    for (std::size_t i = 0; i < m.size(); ++i) {
      CHECK(m[i][0] == 0);
      for (std::size_t j = 1; j <= m.size(); ++j) CHECK(m[i][j] == (i + 1 == j ? 1 : 0));
    }
  }
  CHECK_THROWS_AS(miller_basis(13, 10), Error);
  CHECK_THROWS_AS(miller_basis(202, 10), Error);
}

TEST_CASE("weight 12 eigenform") {
  auto cfg = cfg30();
  WorkingPrecision wp(cfg);
  auto forms = eigenforms(12, 360, cfg);
  REQUIRE(forms.size() == 1);
  const HeckeForm& f = forms[0];
  CHECK(f.root_number == 1);
  CHECK(f.lambda[1] == 1.0);
  CHECK(rel_err(f.lambda[2], Real(-24) / pow(Real(2), Real("5.5"))) < 1e-28);
  auto tau = discriminant_product(20);
  for (long n = 1; n <= 20; ++n) {
    Real expect = Real(tau[n].get_d()) / pow(Real(n), Real("5.5"));
    CHECK(rel_err(f.lambda[n], expect) < 1e-14);
  }
  CHECK(f.hecke_defect < 1e-25);
  CHECK_THROWS_AS(eigenforms(12, 100, cfg), Error);
}

TEST_CASE("Hecke relations and Deligne bound") {
  auto cfg = cfg30();
  WorkingPrecision wp(cfg);
  for (long k : {24L, 36L, 48L, 62L}) {
    auto forms = eigenforms(k, 30 * k, cfg);
    REQUIRE(long(forms.size()) == dim_cusp_forms(k));
    for (std::size_t i = 1; i < forms.size(); ++i) CHECK(forms[i - 1].lambda[2] < forms[i].lambda[2]);
    CHECK(forms[0].root_number == (k % 4 == 0 ? 1 : -1));
    for (auto& f : forms) {
      long N = f.N;
      double worst = 0;
      for (long m = 2; m <= 40; ++m) {
        for (long n = 2; m * n <= N; ++n) {
          if (std::gcd(m, n) != 1) continue;
          worst = std::max(worst, abs(f.lambda[m] * f.lambda[n] - f.lambda[m * n]).to_double());
        }
      }
      CHECK(worst < 1e-8);
      for (long p : {2L, 3L, 5L, 7L}) {
        for (long r = 1; std::pow(p, r + 1) <= N; ++r) {
          long pr = std::lround(std::pow(p, r));
          Real lhs = f.lambda[p] * f.lambda[pr];
          Real rhs = f.lambda[pr * p] + f.lambda[pr / p];
          CHECK(abs(lhs - rhs) < 1e-8);
        }
      }
      CHECK(abs(f.lambda[2] * f.lambda[2] - f.lambda[4] - 1) < 1e-10);
      for (long p = 2; p <= 97; ++p) {
        bool prime = true;
        for (long d = 2; d * d <= p; ++d) prime = prime && p % d != 0;
        if (prime) CHECK(abs(f.lambda[p]) <= 2 + 1e-6);
      }
    }
  }
  auto two = eigenforms(24, 720, cfg);
  REQUIRE(two.size() == 2);
  CHECK(abs(two[0].lambda[2] - two[1].lambda[2]) > 0.1);
}

TEST_CASE("central value of the weight 12 form") {
  auto cfg = cfg30();
  WorkingPrecision wp(cfg);
  HeckeForm f = eigenforms(12, 360, cfg)[0];
  Real L = central_L(f, cfg);
  CHECK(L > 0.0);
  CHECK(std::fabs(L.to_double() - double(theta_integral_weight12())) < 1e-6);
  // frozen after the checks above
  CHECK(rel_err(L, Real("0.79212283864603056935594489")) < 1e-26);

  AfeOptions longer;
  longer.length = 2 * 60;
  CHECK(abs(central_L_sum(f, cfg, longer) - L) < 1e-10);
  AfeOptions split;
  split.split = 1.25;
  CHECK(abs(central_L(f, cfg, split) - L) < 1e-8);
  AfeOptions gauss;
  gauss.kernel = AfeKernel::gaussian;
  gauss.width = 4;
  gauss.length = 60;
  CHECK(abs(central_L_sum(f, cfg, gauss) - L) < 1e-8);
}

TEST_CASE("central values vanish for odd sign and are nonnegative otherwise") {
  auto cfg = cfg30();
  WorkingPrecision wp(cfg);
  for (long k : {18L, 26L, 30L}) {
    for (auto& f : eigenforms(k, 30 * k, cfg)) {
      CHECK(central_L(f, cfg).is_zero());
      AfeOptions split;
      split.split = 1.25;
      CHECK(abs(central_L_sum(f, cfg, split)) < 1e-12);
    }
  }
  for (long k : {24L, 40L, 56L}) {
    for (auto& f : eigenforms(k, 30 * k, cfg)) {
      Real L = central_L(f, cfg);
      CHECK(L >= -1e-8);
      AfeOptions split;
      split.split = 0.8;
      CHECK(abs(central_L(f, cfg, split) - L) < 1e-8);
      AfeOptions gauss;
      gauss.kernel = AfeKernel::gaussian;
      gauss.width = 4;
      CHECK(abs(central_L_sum(f, cfg, gauss) - L) < 1e-8);
    }
  }
}

TEST_CASE("adjoint value at 1") {
  auto cfg = cfg30();
  WorkingPrecision wp(cfg);
  HeckeForm delta = eigenforms(12, 360, cfg)[0];
  // (pi/2) (4 pi)^12 <Delta, Delta> / 11! with the Petersson norm of Delta
  CHECK(rel_err(adjoint_L1(delta, cfg), Real("0.63179294572788320301111633")) < 1e-25);

  AdjointWeights shorter = adjoint_weights(12, 60, cfg);
  AdjointWeights longer = adjoint_weights(12, 120, cfg);
  CHECK(rel_err(adjoint_L1(delta, cfg, &shorter), adjoint_L1(delta, cfg, &longer)) < 1e-20);
  AdjointWeights wrong = adjoint_weights(16, 60, cfg);
  CHECK_THROWS_AS(adjoint_L1(delta, cfg, &wrong), Error);

  for (long k : {24L, 36L, 50L}) {
    AdjointWeights w = adjoint_weights(k, 0, cfg);
    for (auto& f : eigenforms(k, 30 * k, cfg)) {
      Real a = adjoint_L1(f, cfg, &w);
      CHECK(a > 0.0);
      double inv = 1 / a.to_double(), lk = std::log(double(k));
      CHECK(inv >= 1 / (lk * lk) / 10);
      CHECK(inv <= 10 * lk);
    }
  }
}

TEST_CASE("moment statistics on a small table") {
  auto cfg = cfg30();
  WorkingPrecision wp(cfg);
  MomentTable t = moment_table(12, 24, cfg, 2);
  REQUIRE(t.rows.size() == 6);  // 12, 16, 18, 20, 22, 24
  for (auto& r : t.rows) {
    CHECK(r.m4 >= 0.0);
    CHECK(long(r.central.size()) == r.dim);
    if (r.k % 4 == 2) CHECK(r.m4.is_zero());
  }
  const MomentRow* r12 = t.find(12);
  REQUIRE(r12);
  CHECK(rel_err(r12->m4, pow(r12->central[0], 4L) / r12->adjoint[0]) < 1e-28);
  CHECK(rel_err(r12->m4, fourth_moment(12, cfg)) < 1e-25);
  CHECK(fourth_moment(18, cfg).is_zero());
  CHECK(t.find(14) == nullptr);

  // twelfth moment against an independent loop over the table in reverse order
  Real direct;
  for (auto it = t.rows.rbegin(); it != t.rows.rend(); ++it) {
    for (std::size_t i = it->central.size(); i-- > 0;) direct += pow(it->central[i], 12L) / it->adjoint[i];
  }
  Real m12 = twelfth_moment(t, 12);
  CHECK(rel_err(m12, direct) < 1e-25);
  CHECK(m12 > 0.0);

  long at0 = density_count(t, 12, 0.0);
  CHECK(at0 == 7);
  long prev = at0;
  for (double V : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    long c = density_count(t, 12, V);
    CHECK(c <= prev);
    prev = c;
  }
  CHECK(density_count(t, 12, 1e30) == 0);
  double vmax = 0;
  for (auto& r : t.rows) {
    for (auto& c : r.central) vmax = std::max(vmax, c.to_double());
  }
  CHECK(density_count(t, 12, vmax) == 1);

  CHECK(weyl_ratio(t) <= 10);
  CHECK(fourth_moment_ratio(t) <= 10);
  CHECK_THROWS_AS(twelfth_moment(t, 13), Error);
}
