#include "hecke/hecke.hpp"

#include "numerics/errors.hpp"
#include "numerics/parallel.hpp"
#include "numerics/quadrature.hpp"
#include "numerics/special.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wml {

long dim_cusp_forms(long k) {
  if (k < 12 || k % 2 != 0) return 0;
  long d = k / 12;
  return k % 12 == 2 ? d - 1 : d;
}

namespace {

Real from_mpz(const mpz_class& z) {
  Real r;
  mpfr_set_z(r.get(), z.get_mpz_t(), MPFR_RNDN);
  return r;
}

QSeries mul(const QSeries& a, const QSeries& b, long N) {
  QSeries r(N + 1);
  long va = 0, vb = 0;
  while (va <= N && a[va] == 0) ++va;
  while (vb <= N && b[vb] == 0) ++vb;
  for (long i = va; i <= N; ++i) {
    if (a[i] == 0) continue;
    for (long j = vb; i + j <= N; ++j) mpz_addmul(r[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
  }
  return r;
}

QSeries power(const QSeries& a, long e, long N) {
  QSeries r(N + 1);
  r[0] = 1;
  for (long i = 0; i < e; ++i) r = mul(r, a, N);
  return r;
}

// 1 + c sum sigma_{m}(n) q^n
QSeries eisenstein(long c, unsigned m, long N) {
  QSeries e(N + 1);
  e[0] = 1;
  for (long d = 1; d <= N; ++d) {
    mpz_class dm;
    mpz_ui_pow_ui(dm.get_mpz_t(), static_cast<unsigned long>(d), m);
    dm *= c;
    for (long n = d; n <= N; n += d) e[n] += dm;
  }
  return e;
}

}  // namespace

std::vector<QSeries> miller_basis(long k, long N) {
  require(k % 2 == 0 && k >= 12 && k <= 200, "miller_basis: k must be even with 12 <= k <= 200");
  long d = dim_cusp_forms(k);
  require(N >= std::max(d, 1L) && N <= 10000, "miller_basis: N must satisfy dim <= N <= 10^4");
  if (d == 0) return {};

  QSeries e4 = eisenstein(240, 3, N), e6 = eisenstein(-504, 5, N);
  QSeries e4c = mul(mul(e4, e4, N), e4, N);
  QSeries delta = e4c;
  QSeries e6s = mul(e6, e6, N);
  for (long n = 0; n <= N; ++n) {
    delta[n] -= e6s[n];
    mpz_divexact_ui(delta[n].get_mpz_t(), delta[n].get_mpz_t(), 1728);
  }

  // form_i = Delta^i (E4^3)^{d-i} E4^a E6^b with 4a + 6b = k - 12d
  long b = (k % 4 == 0) ? 0 : 1;
  long a = (k - 12 * d - 6 * b) / 4;
  QSeries rest = power(e4, a, N);
  if (b) rest = mul(rest, e6, N);

  std::vector<QSeries> delta_pow{QSeries()}, e4c_pow{rest};
  delta_pow[0].assign(N + 1, 0);
  delta_pow[0][0] = 1;
  for (long i = 1; i <= d; ++i) delta_pow.push_back(mul(delta_pow.back(), delta, N));
  for (long i = 1; i < d; ++i) e4c_pow.push_back(mul(e4c_pow.back(), e4c, N));

  std::vector<QSeries> rows(d);
  for (long i = 1; i <= d; ++i) rows[i - 1] = mul(delta_pow[i], e4c_pow[d - i], N);

  // back substitution to the echelon form; each row starts with q^i, so the pivots are 1
  for (long i = d; i >= 1; --i) {
    for (long j = i + 1; j <= d; ++j) {
      mpz_class c = rows[i - 1][j];
      if (c == 0) continue;
      for (long n = 0; n <= N; ++n) mpz_submul(rows[i - 1][n].get_mpz_t(), c.get_mpz_t(), rows[j - 1][n].get_mpz_t());
    }
  }
  return rows;
}

namespace {

// Matrix of T_p on the echelon basis: column j holds the first d coefficients of T_p b_j.
std::vector<std::vector<mpz_class>> hecke_matrix(const std::vector<QSeries>& basis, long k, long p) {
  long d = static_cast<long>(basis.size());
  mpz_class pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k - 1));
  std::vector<std::vector<mpz_class>> m(d, std::vector<mpz_class>(d));
  for (long j = 0; j < d; ++j) {
    for (long i = 1; i <= d; ++i) {
      mpz_class v = basis[j][i * p];
      if (i % p == 0) v += pk * basis[j][i / p];
      m[i - 1][j] = v;
    }
  }
  return m;
}

// Characteristic polynomial det(x I - M) by Faddeev-LeVerrier; coefficients c[0..d], c[d] = 1.
// Every division is exact over the integers.
std::vector<mpz_class> charpoly(const std::vector<std::vector<mpz_class>>& a) {
  long n = static_cast<long>(a.size());
  using Mat = std::vector<std::vector<mpz_class>>;
  std::vector<mpz_class> c(n + 1);
  c[n] = 1;
  Mat m(n, std::vector<mpz_class>(n));  // M_0 = 0
  for (long k = 1; k <= n; ++k) {
    Mat am(n, std::vector<mpz_class>(n));
    for (long i = 0; i < n; ++i) {
      for (long j = 0; j < n; ++j) {
        for (long l = 0; l < n; ++l) am[i][j] += a[i][l] * m[l][j];
      }
    }
    // M_k = A M_{k-1} + c_{n-k+1} I
    for (long i = 0; i < n; ++i) am[i][i] += c[n - k + 1];
    m = std::move(am);
    mpz_class tr = 0;
    for (long i = 0; i < n; ++i) {
      for (long l = 0; l < n; ++l) tr += a[i][l] * m[l][i];
    }
    mpz_class q = -tr;
    mpz_divexact_ui(q.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(k));
    c[n - k] = q;
  }
  return c;
}

Complex horner(const std::vector<Complex>& c, const Complex& x) {
  Complex r = c.back();
  for (long i = static_cast<long>(c.size()) - 2; i >= 0; --i) r = r * x + c[i];
  return r;
}

// Roots of a real polynomial with only real roots, by Laguerre with deflation and Newton polishing.
std::vector<Real> real_roots(const std::vector<mpz_class>& coef) {
  long n = static_cast<long>(coef.size()) - 1;
  std::vector<Complex> orig;
  for (auto& c : coef) orig.emplace_back(from_mpz(c));
  std::vector<Complex> p = orig;
  std::vector<Real> roots;
  Real eps = pow10(-current_digits());
  for (long deg = n; deg >= 1; --deg) {
    Complex x(Real("0.1"), Real("0.05"));
    for (int it = 0; it < 500; ++it) {
      std::vector<Complex> d1(deg), d2(std::max<long>(deg - 1, 1));
      for (long i = 1; i <= deg; ++i) d1[i - 1] = p[i] * i;
      for (long i = 2; i <= deg; ++i) d2[i - 2] = p[i] * (i * (i - 1));
      Complex f = horner(p, x);
      if (abs(f).is_zero()) break;
      Complex g = horner(d1, x) / f;
      Complex h = g * g - (deg > 1 ? horner(d2, x) / f : Complex());
      Complex sq = sqrt((h * deg - g * g) * (deg - 1));
      Complex den1 = g + sq, den2 = g - sq;
      Complex den = abs(den1) > abs(den2) ? den1 : den2;
      Complex step = abs(den).is_zero() ? Complex(Real(1)) : Complex(Real(deg)) / den;
      x -= step;
      if (abs(step) <= eps * max(abs(x), Real(1))) break;
    }
    // polish on the undeflated polynomial
    std::vector<Complex> d1(n);
    for (long i = 1; i <= n; ++i) d1[i - 1] = orig[i] * i;
    for (int it = 0; it < 20; ++it) {
      Complex dp = horner(d1, x);
      if (abs(dp).is_zero()) break;
      x -= horner(orig, x) / dp;
    }
    roots.push_back(x.re);
    // deflate by (y - x)
    std::vector<Complex> q(deg);
    Complex carry = p[deg];
    for (long i = deg - 1; i >= 0; --i) {
      q[i] = carry;
      carry = p[i] + carry * x;
    }
    p = std::move(q);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Null vector of (M - mu I) normalized to first component 1, by elimination on rows and columns 2..d.
std::vector<Real> eigenvector(const std::vector<std::vector<mpz_class>>& m, const Real& mu) {
  long d = static_cast<long>(m.size());
  std::vector<Real> c(d);
  c[0] = 1;
  if (d == 1) return c;
  long n = d - 1;
  std::vector<std::vector<Real>> a(n, std::vector<Real>(n + 1));
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      a[i][j] = from_mpz(m[i + 1][j + 1]);
      if (i == j) a[i][j] -= mu;
    }
    a[i][n] = -from_mpz(m[i + 1][0]);
  }
  for (long col = 0; col < n; ++col) {
    long piv = col;
    for (long r = col + 1; r < n; ++r) {
      if (abs(a[r][col]) > abs(a[piv][col])) piv = r;
    }
    std::swap(a[col], a[piv]);
    require(!a[col][col].is_zero(), "eigenforms: singular eigenvector system");
    for (long r = col + 1; r < n; ++r) {
      Real f = a[r][col] / a[col][col];
      for (long j = col; j <= n; ++j) a[r][j] -= f * a[col][j];
    }
  }
  for (long i = n - 1; i >= 0; --i) {
    Real s = a[i][n];
    for (long j = i + 1; j < n; ++j) s -= a[i][j] * c[j + 1];
    c[i + 1] = s / a[i][i];
  }
  return c;
}

std::vector<long> smallest_prime_factor(long N) {
  std::vector<long> spf(N + 1, 0);
  for (long i = 2; i <= N; ++i) {
    if (spf[i]) continue;
    for (long j = i; j <= N; j += i) {
      if (!spf[j]) spf[j] = i;
    }
  }
  return spf;
}

// lambda(p^e) from lambda(p) by the Hecke recursion.
Real prime_power(const Real& lp, long e) {
  Real prev(1), cur = lp;
  if (e == 0) return prev;
  for (long i = 1; i < e; ++i) {
    Real next = lp * cur - prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

std::vector<HeckeForm> eigenforms(long k, long N, const PrecisionConfig& cfg) {
  cfg.validate();
  require(k % 2 == 0 && k >= 12 && k <= 200, "eigenforms: k must be even with 12 <= k <= 200");
  require(N >= 30 * k, "eigenforms: N must be at least 30 k");
  long d = dim_cusp_forms(k);
  if (d == 0) return {};
  std::vector<QSeries> basis = miller_basis(k, N);

  // eigen-decomposition and reconstruction at doubled precision
  PrecisionScope scope(2 * cfg.working_bits());
  Real sep_floor = pow10(-cfg.digits / 2);
  std::vector<Real> mus;
  std::vector<std::vector<mpz_class>> m;
  long prime = 0;
  for (long p : {2L, 3L}) {
    m = hecke_matrix(basis, k, p);
    mus = real_roots(charpoly(m));
    Real scale = pow(Real(p), Real(k - 1) / 2);
    Real gap = Real(1e300);
    for (std::size_t i = 1; i < mus.size(); ++i) gap = min(gap, (mus[i] - mus[i - 1]) / scale);
    if (d == 1 || gap > sep_floor) {
      prime = p;
      break;
    }
  }
  if (!prime) {
    fail(ErrorCode::precision, "eigenforms: Hecke eigenvalues at 2 and 3 cluster below 1e-" +
                                   std::to_string(cfg.digits / 2) + " for k = " + std::to_string(k) +
                                   "; raise digits");
  }

  std::vector<long> spf = smallest_prime_factor(N);
  Real half_k1 = Real(k - 1) / 2;
  std::vector<HeckeForm> forms;
  for (const Real& mu : mus) {
    std::vector<Real> c = eigenvector(m, mu);
    // direct expansion a_f(n) = sum_i c_i b_i(n), normalized
    std::vector<Real> direct(N + 1);
    for (long n = 1; n <= N; ++n) {
      Real s;
      for (long i = 0; i < d; ++i) {
        if (basis[i][n] == 0) continue;
        s += c[i] * from_mpz(basis[i][n]);
      }
      direct[n] = s / pow(Real(n), half_k1);
    }
    HeckeForm f;
    f.k = k;
    f.N = N;
    f.root_number = k % 4 == 0 ? 1 : -1;
    f.hecke_prime = prime;
    f.lambda.assign(N + 1, Real());
    f.lambda[1] = 1;
    Real defect;
    for (long n = 2; n <= N; ++n) {
      long p = spf[n], e = 0, r = n;
      while (r % p == 0) {
        r /= p;
        ++e;
      }
      f.lambda[n] = r == 1 ? prime_power(direct[p], e) : f.lambda[r] * prime_power(direct[p], e);
      defect = max(defect, abs(f.lambda[n] - direct[n]));
    }
    f.hecke_defect = defect.to_double();
    forms.push_back(std::move(f));
  }
  // working precision copies
  PrecisionScope back(cfg.working_bits());
  for (auto& f : forms) {
    for (auto& v : f.lambda) v = Real(v.get()) * 1;
  }
  std::sort(forms.begin(), forms.end(), [](const HeckeForm& a, const HeckeForm& b) { return a.lambda[2] < b.lambda[2]; });
  return forms;
}

namespace {

// Regularized upper incomplete Gamma Q(a, x) for a positive integer a.
Real upper_gamma_q(long a, const Real& x) {
  Real term(1), sum(1);
  for (long j = 1; j < a; ++j) {
    term = term * x / j;
    sum += term;
  }
  return exp(-x) * sum;
}

// V_y(n) for n = 1..len with the Gaussian smoothing exp((u/width)^2) on Re u = 2.
std::vector<Real> gaussian_weights(long k, long len, double y, double width, const PrecisionConfig& cfg) {
  Real lg0 = log_gamma(Real(k) / 2);
  std::vector<Real> logx(len);
  for (long n = 1; n <= len; ++n) logx[n - 1] = log(2 * pi() * n * y);
  Real w2 = Real(width) * width;
  MultiLineFunction g = [&](const Real& t, std::vector<Complex>& out) {
    Complex u(Real(2), t);
    Complex common = log_gamma(Complex(Real(k) / 2) + u) - lg0 + u * u / w2 - log(u);
    for (long n = 0; n < len; ++n) out[n] = exp(common - u * logx[n]);
  };
  QuadOptions opt;
  opt.order = 24;
  for (double b = -30; b <= 30; b += 2) opt.breakpoints.push_back(b);
  MultiQuadResult q = quad_line_multi(g, len, Real(-30), Real(30), cfg, opt);
  std::vector<Real> v(len);
  for (long n = 0; n < len; ++n) v[n] = q.value[n].re / (2 * pi());
  return v;
}

long auto_length(const AfeOptions& opt, long k, const PrecisionConfig& cfg, long N) {
  double y = std::min(opt.split, 1 / opt.split);
  if (opt.kernel == AfeKernel::gaussian) {
    // V(n) ~ exp(-(width^2 / 4) log^2(2 pi n y / (k / 2)))
    double span = std::exp(2 * std::sqrt(-std::log(cfg.tail_threshold)) / opt.width);
    return std::min(N, static_cast<long>(std::ceil(span * k / (4 * M_PI * y))));
  }
  // both V_{y0} and V_{1/y0} below the tail threshold
  Real target(cfg.tail_threshold);
  for (long n = 1; n <= N; ++n) {
    if (upper_gamma_q(k / 2, 2 * pi() * n * y) < target) return n;
  }
  return N;
}

}  // namespace

Real central_L_sum(const HeckeForm& f, const PrecisionConfig& cfg, const AfeOptions& opt) {
  cfg.validate();
  require(opt.split > 0, "central_L: split must be positive");
  require(opt.width > 0, "central_L: Gaussian width must be positive");
  require(f.N >= 30 * f.k, "central_L: need N >= 30 k");
  WorkingPrecision wp(cfg);
  long len = opt.length > 0 ? opt.length : auto_length(opt, f.k, cfg, f.N);
  require(len <= f.N, "central_L: sum length exceeds the stored eigenvalues");

  std::vector<Real> v1(len), v2(len);
  if (opt.kernel == AfeKernel::incomplete_gamma) {
    for (long n = 1; n <= len; ++n) {
      v1[n - 1] = upper_gamma_q(f.k / 2, 2 * pi() * n * opt.split);
      v2[n - 1] = upper_gamma_q(f.k / 2, 2 * pi() * n / opt.split);
    }
  } else {
    v1 = gaussian_weights(f.k, len, opt.split, opt.width, cfg);
    v2 = opt.split == 1 ? v1 : gaussian_weights(f.k, len, 1 / opt.split, opt.width, cfg);
  }
  Real sum;
  for (long n = 1; n <= len; ++n) {
    Real w = v1[n - 1] + v2[n - 1] * f.root_number;
    sum += f.lambda[n] * w / sqrt(Real(n));
  }
  return sum;
}

Real central_L(const HeckeForm& f, const PrecisionConfig& cfg, const AfeOptions& opt) {
  if (f.k % 4 == 2) return Real(0);
  WorkingPrecision wp(cfg);
  long len = opt.length > 0 ? opt.length : auto_length(opt, f.k, cfg, f.N);
  AfeOptions a = opt, b = opt;
  a.length = len;
  b.length = std::min(f.N, 2 * len);
  Real s1 = central_L_sum(f, cfg, a);
  Real s2 = central_L_sum(f, cfg, b);
  Real tol = Real(cfg.quad_rel_tol) * max(abs(s2), Real(1));
  if (abs(s1 - s2) > tol) {
    std::ostringstream os;
    os << "central_L: lengths " << a.length << " and " << b.length << " disagree (" << s1.str(20) << " vs "
       << s2.str(20) << ") for k = " << f.k;
    fail(ErrorCode::convergence, os.str());
  }
  return s2;
}

// W(n) falls off roughly as a Gaussian in n / k; the constants cover 1e-(digits + 10).
long default_adjoint_length(long k, const PrecisionConfig& cfg) {
  return static_cast<long>(std::ceil(cfg.digits / 25.0 * k)) + cfg.digits + 10;
}

AdjointWeights adjoint_weights(long k, long len, const PrecisionConfig& cfg) {
  cfg.validate();
  require(k % 2 == 0 && k >= 12, "adjoint_weights: k must be even and at least 12");
  WorkingPrecision wp(cfg);
  if (len <= 0) len = default_adjoint_length(k, cfg);

  // log gamma(s) = -(3s/2) log pi + lgamma((s+1)/2) + lgamma((s+k-1)/2) + lgamma((s+k)/2)
  auto log_gamma_factor = [&](const Complex& s) {
    return s * (-log(pi()) * Real(1.5)) + log_gamma((s + 1L) / 2) + log_gamma((s + (k - 1)) / 2) +
           log_gamma((s + k) / 2);
  };
  Complex g0 = log_gamma_factor(Complex(0)), g1 = log_gamma_factor(Complex(1));
  std::vector<long> spf = smallest_prime_factor(len);
  std::vector<long> primes;
  for (long n = 2; n <= len; ++n) {
    if (spf[n] == n) primes.push_back(n);
  }
  std::vector<Real> logp;
  for (long p : primes) logp.push_back(log(Real(p)));

  // components 0..len-1: W_1(n); len..2len-1: W_0(n); n^{-u} is built multiplicatively
  MultiLineFunction g = [&](const Real& t, std::vector<Complex>& out) {
    Complex u(Real(2), t);
    Complex a1 = exp(log_gamma_factor(Complex(1) + u) - g1 - log(u));
    Complex a0 = exp(log_gamma_factor(u) - g0 - log(u));
    std::vector<Complex> pw(len + 1);
    pw[1] = Complex(1);
    std::vector<Complex> pp(len + 1);
    for (std::size_t i = 0; i < primes.size(); ++i) pp[primes[i]] = exp(-(u * logp[i]));
    for (long n = 2; n <= len; ++n) pw[n] = pw[n / spf[n]] * pp[spf[n]];
    for (long n = 1; n <= len; ++n) {
      out[n - 1] = a1 * pw[n];
      out[len + n - 1] = a0 * pw[n];
    }
  };
  // truncation where the integrand at n = 1 falls below the tail threshold
  double T = 16;
  Real floor_abs(cfg.tail_threshold);
  for (;; T *= 1.5) {
    require(T < 1e5, "adjoint_L1: vertical integrand does not decay");
    Complex u(Real(2), Real(T));
    Real m = max(abs(exp(log_gamma_factor(Complex(1) + u) - g1 - log(u))), abs(exp(log_gamma_factor(u) - g0 - log(u))));
    if (m * T < floor_abs) break;
  }
  QuadOptions opt;
  opt.order = 24;
  opt.abs_floor = floor_abs.to_double();
  for (double b = -T; b <= T; b += 4) opt.breakpoints.push_back(b);
  MultiQuadResult q = quad_line_multi(g, 2 * len, Real(-T), Real(T), cfg, opt);

  AdjointWeights w;
  w.k = k;
  w.len = len;
  w.ratio = exp(g0.re - g1.re);
  for (long n = 0; n < len; ++n) {
    w.w1.push_back(q.value[n].re / (2 * pi()));
    w.w0.push_back(q.value[len + n].re / (2 * pi()));
  }
  return w;
}

Real adjoint_L1(const HeckeForm& f, const PrecisionConfig& cfg, const AdjointWeights* weights) {
  cfg.validate();
  require(f.N >= 30 * f.k, "adjoint_L1: need N >= 30 k");
  WorkingPrecision wp(cfg);
  AdjointWeights own;
  if (!weights) {
    own = adjoint_weights(f.k, std::min(f.N, default_adjoint_length(f.k, cfg)), cfg);
    weights = &own;
  }
  require(weights->k == f.k, "adjoint_L1: weights computed for a different k");
  long len = weights->len;
  require(len <= f.N, "adjoint_L1: sum length exceeds the stored eigenvalues");

  // Dirichlet coefficients of zeta(2s) sum lambda(n^2) n^{-s}
  std::vector<long> spf = smallest_prime_factor(len);
  std::vector<Real> lsq(len + 1);
  lsq[1] = 1;
  for (long n = 2; n <= len; ++n) {
    long p = spf[n], e = 0, r = n;
    while (r % p == 0) {
      r /= p;
      ++e;
    }
    lsq[n] = lsq[r] * prime_power(f.lambda[p], 2 * e);
  }
  std::vector<Real> b(len + 1);
  for (long m = 1; m * m <= len; ++m) {
    for (long d = 1; d * m * m <= len; ++d) b[d * m * m] += lsq[d];
  }

  auto partial = [&](long upto) {
    Real s1, s0;
    for (long n = 1; n <= upto; ++n) {
      s1 += b[n] * weights->w1[n - 1] / n;
      s0 += b[n] * weights->w0[n - 1];
    }
    return s1 + weights->ratio * s0;
  };
  Real full = partial(len), half = partial(len / 2);
  if (abs(full - half) > pow10(-cfg.digits / 2) * max(abs(full), Real(1))) {
    std::ostringstream os;
    os << "adjoint_L1: lengths " << len / 2 << " and " << len << " disagree (" << half.str(20) << " vs "
       << full.str(20) << ") for k = " << f.k;
    fail(ErrorCode::convergence, os.str());
  }
  require(full > 0.0, "adjoint_L1: nonpositive value for k = " + std::to_string(f.k));
  return full;
}

const MomentRow* MomentTable::find(long k) const {
  for (auto& r : rows) {
    if (r.k == k) return &r;
  }
  return nullptr;
}

namespace {

MomentRow moment_row(long k, const PrecisionConfig& cfg) {
  WorkingPrecision wp(cfg);
  MomentRow row;
  row.k = k;
  row.dim = dim_cusp_forms(k);
  AdjointWeights w = adjoint_weights(k, 0, cfg);
  for (const HeckeForm& f : eigenforms(k, default_length(k), cfg)) {
    Real c = central_L(f, cfg), a = adjoint_L1(f, cfg, &w);
    row.m4 += pow(c, 4L) / a;
    row.central.push_back(std::move(c));
    row.adjoint.push_back(std::move(a));
  }
  return row;
}

}  // namespace

MomentTable moment_table(long k_min, long k_max, const PrecisionConfig& cfg, int jobs) {
  require(k_min >= 12 && k_max <= 200 && k_min <= k_max, "moment_table: need 12 <= k_min <= k_max <= 200");
  std::vector<long> ks;
  for (long k = k_min + (k_min % 2); k <= k_max; k += 2) {
    if (dim_cusp_forms(k) > 0) ks.push_back(k);
  }
  WorkingPrecision wp(cfg);
  // heavier weights first so the pool stays balanced
  std::vector<long> order(ks.rbegin(), ks.rend());
  auto rows = parallel_map(order.size(), jobs, [&](std::size_t i) { return moment_row(order[i], cfg); });
  MomentTable t;
  t.rows.assign(rows.rbegin(), rows.rend());
  return t;
}

Real fourth_moment(long k, const PrecisionConfig& cfg) {
  require(k % 2 == 0 && k >= 12 && k <= 200, "fourth_moment: k must be even with 12 <= k <= 200");
  if (dim_cusp_forms(k) == 0) return Real(0);
  return moment_row(k, cfg).m4;
}

Real twelfth_moment(const MomentTable& table, long T) {
  require(T >= 12 && T <= 100, "twelfth_moment: T must lie in [12, 100]");
  Real s;
  for (long k = T + (T % 2); k <= 2 * T; k += 2) {
    if (dim_cusp_forms(k) == 0) continue;
    const MomentRow* r = table.find(k);
    require(r != nullptr, "twelfth_moment: table lacks weight " + std::to_string(k));
    for (std::size_t i = 0; i < r->central.size(); ++i) s += pow(r->central[i], 12L) / r->adjoint[i];
  }
  return s;
}

Real twelfth_moment(long T, const PrecisionConfig& cfg, int jobs) {
  require(T >= 12 && T <= 100, "twelfth_moment: T must lie in [12, 100]");
  return twelfth_moment(moment_table(T, 2 * T, cfg, jobs), T);
}

long density_count(const MomentTable& table, long T, double V) {
  require(T >= 12 && T <= 100, "density_count: T must lie in [12, 100]");
  long count = 0;
  for (long k = T + (T % 2); k <= 2 * T; k += 2) {
    if (dim_cusp_forms(k) == 0) continue;
    const MomentRow* r = table.find(k);
    require(r != nullptr, "density_count: table lacks weight " + std::to_string(k));
    for (auto& c : r->central) {
      if (c.to_double() >= V) ++count;
    }
  }
  return count;
}

long density_count(long T, double V, const PrecisionConfig& cfg, int jobs) {
  require(T >= 12 && T <= 100, "density_count: T must lie in [12, 100]");
  return density_count(moment_table(T, 2 * T, cfg, jobs), T, V);
}

double weyl_ratio(const MomentTable& table) {
  double worst = 0;
  for (auto& r : table.rows) {
    double k = double(r.k);
    double norm = std::cbrt(k) * std::pow(std::log(k), 13.0 / 6);
    for (auto& c : r.central) worst = std::max(worst, c.to_double() / norm);
  }
  return worst;
}

double fourth_moment_ratio(const MomentTable& table) {
  double worst = 0;
  for (auto& r : table.rows) {
    double k = double(r.k);
    worst = std::max(worst, r.m4.to_double() / (std::pow(k, 4.0 / 3) * std::pow(std::log(k), 20.0 / 3)));
  }
  return worst;
}

}  // namespace wml
