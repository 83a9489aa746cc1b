#include "doctest.h"
#include "numerics/errors.hpp"
#include "numerics/special.hpp"
#include "support.hpp"
#include "testfn/testfn.hpp"

#include <cmath>

using namespace wml;
using wml::test::rel_err;

namespace {

const PrecisionConfig kCfg = PrecisionConfig::with_digits(50);

PrecisionConfig oracle_cfg() {
  PrecisionConfig c = PrecisionConfig::with_digits(30);
  c.quad_rel_tol = 1e-16;
  return c;
}

TestFunctionParams params(long K, long L) {
  TestFunctionParams p;
  p.K = K;
  p.L = L;
  return p;
}

Real to_real(const mpq_class& q) {
  Real n(q.get_num().get_str().c_str());
  Real d(q.get_den().get_str().c_str());
  return n / d;
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(params(13, 2).validate(), Error);
  CHECK_THROWS_AS(params(12, 3).validate(), Error);
  CHECK_THROWS_AS(params(16, 4).validate(), Error);  // L^2 >= K - 1
  CHECK_NOTHROW(params(18, 4).validate());
  CHECK_FALSE(params(40, 4).warnings().empty());
  CHECK(params(4096, 8).warnings().empty());
}

TEST_CASE("h_hol at the center is exactly one") {
  WorkingPrecision wp(kCfg);
  for (long K : {12L, 64L, 256L, 2048L}) {
    for (long L : {2L, 4L}) {
      auto p = params(K, L);
      if (p.L2() >= K - 1) continue;
      CHECK(h_hol_weight(K, p) == Real(1));
      Complex v = h_hol(K, p);
      Complex want = (K % 4 == 0) ? Complex(1) : Complex(-1);
      CHECK(v.re == want.re);
      CHECK(v.im.is_zero());
    }
  }
}

TEST_CASE("h_hol small-case values") {
  WorkingPrecision wp(kCfg);
  auto p = params(12, 2);
  Complex v18 = h_hol(18, p);
  CHECK(v18.re.is_zero());
  CHECK(v18.im.is_zero());
  // i^{-10} = -1
  Complex v10 = h_hol(10, p);
  CHECK(rel_err(v10, Complex(Real(-13) / Real(12))) < 1e-50);
  CHECK(h_hol_product(10, p) == mpq_class(13, 12));
  CHECK(h_hol_product(12, p) == 1);
  mpq_class q16 = h_hol_product(16, p);
  CHECK(q16 > 0);
  CHECK(rel_err(h_hol_weight(16, p), to_real(q16)) < 1e-45);
  CHECK_THROWS_AS(h_hol_product(18, p), Error);
}

TEST_CASE("dual path and exact support") {
  WorkingPrecision wp(kCfg);
  double tol = std::pow(10.0, -(kCfg.digits - 15));
  struct Case {
    long K, L;
  } cases[] = {{12, 2}, {40, 2}, {64, 2}, {18, 4}, {256, 4}, {256, 8}, {1024, 8}, {2048, 16}};
  for (auto c : cases) {
    auto p = params(c.K, c.L);
    for (long k = 2; k <= c.K + p.L2() + 6; k += 2) {
      bool inside = k >= c.K - p.L2() && k <= c.K + p.L2();
      Complex v = h_hol(k, p);
      if (!inside) {
        CHECK(v.re.is_zero());
        CHECK(v.im.is_zero());
        continue;
      }
      mpq_class q = h_hol_product(k, p);
      REQUIRE(q > 0);
      double e = rel_err(h_hol_weight(k, p), to_real(q));
      CHECK_MESSAGE(e <= tol, "K=" << c.K << " L=" << c.L << " k=" << k << " err=" << e);
      // phase of h_hol is exactly i^{-k}
      if (k % 4 == 0) CHECK(v.re > 0.0);
      else CHECK(v.re < 0.0);
    }
  }
}

TEST_CASE("localization profile") {
  WorkingPrecision wp(kCfg);
  // Full support for L <= 4; the central half of the support for larger L, where the
  // quadratic expansion's relative correction stays below the slack.
  for (long K : {256L, 512L, 1024L, 2048L}) {
    for (long L : {2L, 4L, 8L, 16L}) {
      auto p = params(K, L);
      if (p.L2() >= K - 1) continue;
      long reach = L <= 4 ? p.L2() : p.L2() / 2;
      double worst = 0;
      for (long k = K - reach; k <= K + reach; k += 2) worst = std::max(worst, localization_deviation(k, p));
      CHECK_MESSAGE(worst <= 3.0, "K=" << K << " L=" << L << " worst=" << worst);
    }
  }
  // At the support edge the deviation grows like L^2, so a fixed slack cannot cover it.
  auto p = params(1024, 8);
  CHECK(localization_deviation(1024 + 64, p) > 3.0);
  CHECK(localization_deviation(1024 + 64, p) < 0.2 * 64);
}

TEST_CASE("Gaussian decay constant") {
  WorkingPrecision wp(kCfg);
  for (long K : {256L, 1024L}) {
    for (long L : {4L, 8L}) {
      double c = gaussian_decay_constant(params(K, L));
      CHECK(c > 0);
      CHECK(c <= 10.0);
    }
  }
}

TEST_CASE("minus-channel sine factor") {
  CHECK(minus_channel_factor_vanishes(params(12, 2)));
  CHECK(minus_channel_factor_vanishes(params(512, 8)));
}

TEST_CASE("H_closed") {
  WorkingPrecision wp(kCfg);
  auto p = params(12, 2);
  for (double x : {1e-6, 1e-5, 1e-4}) {
    Real r = H_closed(Real(2 * x), p) / H_closed(Real(x), p);
    CHECK(std::fabs(r.to_double() / 128 - 1) < 0.01);
  }
  Real h1 = H_closed(Real(1), p);
  CHECK(h1.sign() == bessel_j(Real(11), 4 * pi()).sign());
  // prefactor (1/pi) * 2!^2 * 13! / (4! * 8!) times (2 pi x)^{-4}, |J| <= 1
  Real pre = Real(4) * gamma(Real(14)) / (Real(24) * gamma(Real(9))) / pi();
  Real h10 = H_closed(Real(10), p);
  CHECK(abs(h10) <= pre * pow(2 * pi() * 10, -4L));
  CHECK_THROWS_AS(H_closed(Real(0), p), Error);
  CHECK_THROWS_AS(H_closed(Real(2e4), p), Error);
}

TEST_CASE("H_hat symmetry, positivity and poles") {
  WorkingPrecision wp(kCfg);
  for (auto p : {params(12, 2), params(256, 4), params(512, 8)}) {
    for (double s : {0.1, 0.5, 0.9}) {
      Complex v = H_hat(Complex(s), p);
      CHECK(v.re > 0.0);
      CHECK(v.im.is_zero());
    }
    Complex s(Real("0.37"), Real("41.5"));
    Complex a = H_hat(conj(s), p);
    Complex b = conj(H_hat(s, p));
    CHECK(rel_err(a, b) < std::pow(10.0, -(kCfg.digits - 5)));
    long pole = H_hat_first_pole(p);
    CHECK_THROWS_AS(H_hat(Complex(double(pole)), p), Error);
    CHECK_THROWS_AS(H_hat(Complex(double(pole) + 3e-7, 2e-7), p), Error);
    CHECK_THROWS_AS(H_hat(Complex(double(pole - 2) - 0.5), p), Error);  // left of the domain
  }
}

TEST_CASE("H_hat is finite on the holomorphy strip") {
  WorkingPrecision wp(PrecisionConfig::with_digits(30));
  for (auto p : {params(12, 2), params(64, 4), params(256, 8)}) {
    double lo = double(p.L2() - p.K - 1) + 0.1;
    double pole = double(H_hat_first_pole(p));
    int bad = 0;
    for (double sigma = lo; sigma <= 2.0; sigma += 0.37) {
      if (std::fabs(sigma - pole) < 1e-3) continue;
      for (double tau : {0.0, 0.5, 3.0, 40.0, 900.0, -7.0}) {
        Complex v = H_hat(Complex(sigma, tau), p);
        if (!v.is_finite()) ++bad;
      }
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("Mellin oracle") {
  auto p = params(12, 2);
  auto cfg = oracle_cfg();
  WorkingPrecision wp(cfg);
  CHECK(rel_err(mellin_oracle(Complex(1), p, cfg), H_hat(Complex(1), p)) < 1e-6);
  CHECK(rel_err(mellin_oracle(Complex(0.5), p, cfg), H_hat(Complex(0.5), p)) < 1e-6);
  CHECK(rel_err(mellin_oracle(Complex(0.5, 3.0), p, cfg), H_hat(Complex(0.5, 3.0), p)) < 1e-5);
  CHECK_THROWS_AS(mellin_oracle(Complex(5.0), p, cfg), Error);
}

TEST_CASE("Bessel transform oracle") {
  auto p = params(12, 2);
  auto cfg = oracle_cfg();
  WorkingPrecision wp(cfg);
  for (long k : {8L, 10L, 12L, 14L, 16L, 18L, 20L}) {
    double got = bessel_transform_oracle(k, p, cfg).to_double();
    double want = h_hol_weight(k, p).to_double();
    CHECK_MESSAGE(std::fabs(got - want) < 1e-8, "k=" << k << " got " << got << " want " << want);
  }
}

TEST_CASE("regime bound report") {
  WorkingPrecision wp(kCfg);
  auto p = params(256, 4);
  auto rep = regime_bound_report(p, 0.5, {0.0, 2.0 * 256});
  REQUIRE(rep.grid.size() == 2);
  double r0 = rep.grid[0].ratio.to_double();
  CHECK(r0 >= 1e-2);
  CHECK(r0 <= 1e2);
  CHECK(rep.grid[1].regime == 3);
  CHECK(rep.grid[1].ratio.is_finite());
  CHECK(rep.grid[1].ratio > 0.0);
  CHECK(rep.grid[1].abs_H_hat * std::pow(2.0, 16) <= rep.grid[0].abs_H_hat);
  CHECK(rep.fitted_gaussian_rate > 0);
  CHECK(rep.predicted_gaussian_rate == doctest::Approx(std::pow(4.0 / 512, 2)));
}
