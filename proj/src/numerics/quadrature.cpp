#include "numerics/quadrature.hpp"

#include "numerics/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <queue>

namespace wml {

const GaussRule& gauss_legendre(int n) {
  thread_local std::map<std::pair<int, mpfr_prec_t>, GaussRule> cache;
  auto key = std::make_pair(n, mpfr_get_default_prec());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  int d = current_digits();
  Real tol = pow10(-(d + 2));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Real z(std::cos(M_PI * (i + 0.75) / (n + 0.5)));
    Real dp;
    for (int iter = 0; iter < 100; ++iter) {
      Real p0(1), p1 = z;
      for (int k = 2; k <= n; ++k) {
        Real p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = std::move(p1);
        p1 = std::move(p2);
      }
      // p1 = P_n(z), p0 = P_{n-1}(z)
      dp = n * (z * p1 - p0) / (z * z - 1);
      Real dz = p1 / dp;
      z -= dz;
      if (abs(dz) < tol) {
        if (iter > 0) break;
      }
    }
    Real p0(1), p1 = z;
    for (int k = 2; k <= n; ++k) {
      Real p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
      p0 = std::move(p1);
      p1 = std::move(p2);
    }
    dp = n * (z * p1 - p0) / (z * z - 1);
    Real w = Real(2) / ((1 - z * z) * dp * dp);
    rule.x[i] = -z;
    rule.x[n - 1 - i] = z;
    rule.w[i] = w;
    rule.w[n - 1 - i] = w;
  }
  if (n % 2) rule.x[n / 2] = Real(0);
  return cache.emplace(key, std::move(rule)).first->second;
}

namespace {

struct Estimate {
  std::vector<Complex> value;
  std::vector<Real> mass;
};

Estimate apply_rule(const MultiLineFunction& g, std::size_t dim, const Real& a, const Real& b, const GaussRule& rule,
                    long& evals, std::vector<Complex>& buf) {
  Real half = (b - a) / 2;
  Real mid = (a + b) / 2;
  Estimate e;
  e.value.assign(dim, Complex());
  e.mass.assign(dim, Real(0));
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    Real x = mid + half * rule.x[i];
    buf.assign(dim, Complex());
    g(x, buf);
    for (std::size_t c = 0; c < dim; ++c) {
      if (!buf[c].is_finite()) fail(ErrorCode::convergence, "quadrature: non-finite integrand at x = " + x.str(12));
      e.value[c] += buf[c] * rule.w[i];
      e.mass[c] += abs(buf[c]) * rule.w[i];
    }
  }
  ++evals;
  for (std::size_t c = 0; c < dim; ++c) {
    e.value[c] *= half;
    e.mass[c] *= half;
  }
  return e;
}

struct Panel {
  Real a, b;
  Estimate whole;
  Estimate left, right;
  std::vector<Real> err;
  double priority = 0;
};

struct ByPriority {
  bool operator()(const Panel* p, const Panel* q) const { return p->priority < q->priority; }
};

}  // namespace

MultiQuadResult quad_line_multi(const MultiLineFunction& g, std::size_t dim, const Real& a, const Real& b,
                                const PrecisionConfig& cfg, const QuadOptions& opt) {
  require(a <= b, "quad_line: empty interval");
  require(dim > 0, "quad_line: empty integrand");
  const GaussRule& rule = gauss_legendre(opt.order);
  long rule_calls = 0;
  std::vector<Complex> buf;

  std::vector<Real> edges{a};
  std::vector<double> bp = opt.breakpoints;
  std::sort(bp.begin(), bp.end());
  for (double x : bp) {
    if (a < x && Real(x) < b && Real(x) > edges.back()) edges.emplace_back(x);
  }
  edges.push_back(b);

  std::vector<std::unique_ptr<Panel>> store;
  std::priority_queue<Panel*, std::vector<Panel*>, ByPriority> heap;
  std::vector<Complex> total(dim);
  std::vector<Real> total_err(dim), total_mass(dim);
  Real floor_abs(opt.abs_floor > 0 ? opt.abs_floor : cfg.tail_threshold);
  Real rel(cfg.quad_rel_tol);

  auto target = [&](std::size_t c) { return max(rel * total_mass[c], floor_abs); };

  auto add = [&](Panel* p, int sign) {
    for (std::size_t c = 0; c < dim; ++c) {
      Complex v = p->left.value[c] + p->right.value[c];
      Real m = p->left.mass[c] + p->right.mass[c];
      if (sign > 0) {
        total[c] += v;
        total_err[c] += p->err[c];
        total_mass[c] += m;
      } else {
        total[c] -= v;
        total_err[c] -= p->err[c];
        total_mass[c] -= m;
      }
    }
  };

  auto finish = [&](std::unique_ptr<Panel> p) {
    Real m = (p->a + p->b) / 2;
    p->left = apply_rule(g, dim, p->a, m, rule, rule_calls, buf);
    p->right = apply_rule(g, dim, m, p->b, rule, rule_calls, buf);
    p->err.resize(dim);
    for (std::size_t c = 0; c < dim; ++c) {
      p->err[c] = abs(p->whole.value[c] - p->left.value[c] - p->right.value[c]);
    }
    add(p.get(), +1);
    store.push_back(std::move(p));
    return store.back().get();
  };

  auto prioritize = [&](Panel* p) {
    double worst = 0;
    for (std::size_t c = 0; c < dim; ++c) worst = std::max(worst, (p->err[c] / target(c)).to_double());
    p->priority = worst;
    heap.push(p);
  };

  std::vector<Panel*> fresh;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    auto p = std::make_unique<Panel>();
    p->a = edges[i];
    p->b = edges[i + 1];
    p->whole = apply_rule(g, dim, p->a, p->b, rule, rule_calls, buf);
    fresh.push_back(finish(std::move(p)));
  }
  for (Panel* p : fresh) prioritize(p);

  auto converged = [&](std::size_t* worst) {
    bool ok = true;
    double w = -1;
    for (std::size_t c = 0; c < dim; ++c) {
      double r = (total_err[c] / target(c)).to_double();
      if (r > 1) ok = false;
      if (r > w) {
        w = r;
        if (worst) *worst = c;
      }
    }
    return ok;
  };

  long live = static_cast<long>(edges.size()) - 1;
  std::size_t worst_c = 0;
  while (!converged(&worst_c)) {
    if (live >= opt.max_panels || heap.empty()) {
      Panel* worst = heap.empty() ? nullptr : heap.top();
      std::string where = worst ? "[" + worst->a.str(10) + ", " + worst->b.str(10) + "]" : "?";
      std::string comp = dim > 1 ? " (component " + std::to_string(worst_c) + ")" : "";
      fail(ErrorCode::convergence, "quadrature did not converge" + comp + ": error " + total_err[worst_c].str(4) +
                                       " vs target " + target(worst_c).str(4) + " after " + std::to_string(live) +
                                       " panels; worst panel " + where);
    }
    Panel* p = heap.top();
    heap.pop();
    add(p, -1);
    Real m = (p->a + p->b) / 2;
    if (!(p->a < m && m < p->b)) {
      fail(ErrorCode::convergence, "quadrature: panel width underflow near " + m.str(12));
    }
    auto c1 = std::make_unique<Panel>();
    c1->a = p->a;
    c1->b = m;
    c1->whole = std::move(p->left);
    auto c2 = std::make_unique<Panel>();
    c2->a = m;
    c2->b = p->b;
    c2->whole = std::move(p->right);
    prioritize(finish(std::move(c1)));
    prioritize(finish(std::move(c2)));
    ++live;
    // guard against drift in the running sums and refresh stale priorities
    if (live % 512 == 0) {
      std::vector<Panel*> items;
      while (!heap.empty()) {
        items.push_back(heap.top());
        heap.pop();
      }
      std::fill(total.begin(), total.end(), Complex());
      std::fill(total_err.begin(), total_err.end(), Real(0));
      std::fill(total_mass.begin(), total_mass.end(), Real(0));
      for (Panel* q : items) add(q, +1);
      for (Panel* q : items) prioritize(q);
    }
  }

  MultiQuadResult r;
  r.value = std::move(total);
  r.error = std::move(total_err);
  r.mass = std::move(total_mass);
  r.evaluations = rule_calls * static_cast<long>(rule.x.size());
  r.panels = live;
  return r;
}

QuadResult quad_line(const LineFunction& g, const Real& a, const Real& b, const PrecisionConfig& cfg,
                     const QuadOptions& opt) {
  MultiLineFunction mg = [&](const Real& x, std::vector<Complex>& out) { out[0] = g(x); };
  MultiQuadResult m = quad_line_multi(mg, 1, a, b, cfg, opt);
  QuadResult r;
  r.value = std::move(m.value[0]);
  r.error = std::move(m.error[0]);
  r.mass = std::move(m.mass[0]);
  r.evaluations = m.evaluations;
  r.panels = m.panels;
  return r;
}

QuadResult quad_vertical(const VerticalFunction& f, const Real& sigma, const Real& tau_lo, const Real& tau_hi,
                         const PrecisionConfig& cfg, const QuadOptions& opt) {
  QuadResult r = quad_line([&](const Real& tau) { return f(Complex(sigma, tau)); }, tau_lo, tau_hi, cfg, opt);
  r.value = times_i(r.value);
  return r;
}

Complex quad_circle(const std::function<Complex(const Complex&)>& f, const Complex& center, const Real& radius,
                    int nodes) {
  require(nodes > 0 && (nodes & (nodes - 1)) == 0, "quad_circle: nodes must be a power of two");
  require(radius > 0.0, "quad_circle: radius must be positive");
  Complex sum;
  Real step = pi() * 2 / nodes;
  for (int j = 0; j < nodes; ++j) {
    Complex dz = polar(radius, step * (Real(j) + 0.5));
    Complex v = f(center + dz);
    if (!v.is_finite()) fail(ErrorCode::convergence, "quad_circle: non-finite value at node " + std::to_string(j));
    sum += v * dz;
  }
  return sum / static_cast<long>(nodes);
}

std::vector<double> graded_edges(double start, double knee, double end, double h, double ratio) {
  std::vector<double> e;
  double x = start;
  while (x < knee && x < end) {
    e.push_back(x);
    x += h;
  }
  double w = h;
  while (x < end) {
    e.push_back(x);
    w *= ratio;
    x += w;
  }
  e.push_back(end);
  return e;
}

}  // namespace wml
