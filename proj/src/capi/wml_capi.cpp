#include "wml/wml.h"

#include "capi/checks.hpp"
#include "harness/harness.hpp"
#include "hecke/hecke.hpp"
#include "kernels/kernels.hpp"
#include "numerics/errors.hpp"
#include "numerics/parallel.hpp"
#include "testfn/testfn.hpp"

#include <json.hpp>

#include <cstdlib>
#include <cstring>
#include <sstream>

struct wml_context {
  wml::TestFunctionParams params;
  wml::TransformConfig tc;
  int jobs = wml::default_jobs();
  std::string last_error;
};

struct wml_moment_table {
  wml::MomentTable table;
};

struct wml_spectral_data {
  wml::SpectralDataset data;
};

namespace {

using wml::Real;

wml_status to_status(wml::ErrorCode c) {
  switch (c) {
    case wml::ErrorCode::invalid_argument: return WML_E_INVALID;
    case wml::ErrorCode::domain: return WML_E_DOMAIN;
    case wml::ErrorCode::pole: return WML_E_POLE;
    case wml::ErrorCode::convergence: return WML_E_CONVERGENCE;
    case wml::ErrorCode::overflow: return WML_E_OVERFLOW;
    case wml::ErrorCode::schema: return WML_E_SCHEMA;
    case wml::ErrorCode::io: return WML_E_IO;
    case wml::ErrorCode::precision: return WML_E_PRECISION;
  }
  return WML_E_INTERNAL;
}

template <typename F>
wml_status guarded(wml_context* ctx, F&& f) {
  if (!ctx) return WML_E_INVALID;
  ctx->last_error.clear();
  try {
    wml::WorkingPrecision wp(ctx->tc.cfg);
    return f();
  } catch (const wml::Error& e) {
    ctx->last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    ctx->last_error = e.what();
    return WML_E_INTERNAL;
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

wml_status emit(const std::string& s, char** out) {
  if (!out) return WML_E_INVALID;
  *out = dup(s);
  return *out ? WML_OK : WML_E_INTERNAL;
}

std::string num(const Real& x, int digits = 17) { return x.str(digits); }

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Column-major table rendered as CSV with a header, or as a JSON array of objects with string values.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string render(wml_format fmt) const {
    if (fmt == WML_FORMAT_JSON) {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (auto& r : rows) {
        nlohmann::ordered_json o;
        for (std::size_t i = 0; i < columns.size(); ++i) o[columns[i]] = r[i];
        arr.push_back(o);
      }
      return arr.dump(2) + "\n";
    }
    std::string s;
    for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
    s += '\n';
    for (auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
      s += '\n';
    }
    return s;
  }
};

bool valid_format(wml_format f) { return f == WML_FORMAT_CSV || f == WML_FORMAT_JSON; }

}  // namespace

extern "C" {

const char* wml_version(void) { return "1.0.0"; }

const char* wml_status_name(wml_status s) {
  switch (s) {
    case WML_OK: return "ok";
    case WML_E_INVALID: return "invalid argument";
    case WML_E_DOMAIN: return "domain error";
    case WML_E_POLE: return "pole";
    case WML_E_CONVERGENCE: return "convergence failure";
    case WML_E_OVERFLOW: return "overflow";
    case WML_E_SCHEMA: return "schema error";
    case WML_E_IO: return "i/o error";
    case WML_E_PRECISION: return "insufficient precision";
    case WML_E_CHECK: return "check failed";
    case WML_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

wml_status wml_context_create(wml_context** out) {
  if (!out) return WML_E_INVALID;
  try {
    *out = new wml_context;
    (*out)->tc.cfg = wml::PrecisionConfig::with_digits(50);
  } catch (...) {
    return WML_E_INTERNAL;
  }
  return WML_OK;
}

void wml_context_destroy(wml_context* ctx) { delete ctx; }

const char* wml_last_error(const wml_context* ctx) { return ctx ? ctx->last_error.c_str() : ""; }

wml_status wml_set_params(wml_context* ctx, long K, long L) {
  return guarded(ctx, [&] {
    wml::TestFunctionParams p = ctx->params;
    p.K = K;
    p.L = L;
    p.validate();
    ctx->params = p;
    return WML_OK;
  });
}

wml_status wml_set_digits(wml_context* ctx, int digits) {
  if (!ctx) return WML_E_INVALID;
  ctx->last_error.clear();
  try {
    wml::PrecisionConfig c = wml::PrecisionConfig::with_digits(digits);
    c.validate();
    ctx->tc.cfg = c;
  } catch (const wml::Error& e) {
    ctx->last_error = e.what();
    return to_status(e.code());
  }
  return WML_OK;
}

wml_status wml_set_tolerances(wml_context* ctx, double quad_rel_tol, double tail_threshold) {
  return guarded(ctx, [&] {
    wml::PrecisionConfig c = ctx->tc.cfg;
    if (quad_rel_tol > 0) c.quad_rel_tol = quad_rel_tol;
    if (tail_threshold > 0) c.tail_threshold = tail_threshold;
    c.validate();
    ctx->tc.cfg = c;
    return WML_OK;
  });
}

wml_status wml_set_transform(wml_context* ctx, double sigma, double tau_max, int order) {
  return guarded(ctx, [&] {
    wml::TransformConfig t = ctx->tc;
    t.sigma = sigma;
    t.tau_max = tau_max;
    if (order > 0) t.order = order;
    t.validate();
    ctx->tc = t;
    return WML_OK;
  });
}

wml_status wml_set_jobs(wml_context* ctx, int jobs) {
  if (!ctx) return WML_E_INVALID;
  if (jobs < 1) {
    ctx->last_error = "jobs must be at least 1";
    return WML_E_INVALID;
  }
  ctx->jobs = jobs;
  return WML_OK;
}

void wml_string_free(char* s) { std::free(s); }

wml_status wml_testfn_weight(wml_context* ctx, long k, double* value) {
  return guarded(ctx, [&] {
    if (!value) return WML_E_INVALID;
    *value = wml::h_hol_weight(k, ctx->params).to_double();
    return WML_OK;
  });
}

wml_status wml_testfn_emit(wml_context* ctx, const char* what, wml_format fmt, char** out) {
  return guarded(ctx, [&] {
    if (!what || !valid_format(fmt)) return WML_E_INVALID;
    const auto& p = ctx->params;
    Table t;
    std::string w = what;
    if (w == "support") {
      t.columns = {"k", "weight"};
      for (long k = std::max(2L, p.K - p.L2()); k <= p.K + p.L2(); k += 2) {
        t.rows.push_back({std::to_string(k), num(wml::h_hol_weight(k, p))});
      }
    } else if (w == "compare") {
      t.columns = {"k", "weight", "product", "rel_diff"};
      for (long k = std::max(2L, p.K - p.L2()); k <= p.K + p.L2(); k += 2) {
        Real a = wml::h_hol_weight(k, p);
        mpq_class q = wml::h_hol_product(k, p);
        Real b;
        mpfr_set_q(b.get(), q.get_mpq_t(), MPFR_RNDN);
        t.rows.push_back({std::to_string(k), num(a), num(b), num(abs(a - b) / abs(b), 3)});
      }
    } else {
      ctx->last_error = "testfn: unknown emit target '" + w + "' (expected support or compare)";
      return WML_E_INVALID;
    }
    return emit(t.render(fmt), out);
  });
}

wml_status wml_regime_emit(wml_context* ctx, const double* tau, size_t n, wml_format fmt, char** out) {
  return guarded(ctx, [&] {
    if ((!tau && n) || !valid_format(fmt)) return WML_E_INVALID;
    wml::RegimeBoundReport r =
        wml::regime_bound_report(ctx->params, ctx->tc.sigma, std::vector<double>(tau, tau + n));
    Table t;
    t.columns = {"tau", "abs_Hhat", "regime_bound", "ratio"};
    for (auto& row : r.grid) t.rows.push_back({num(row.tau), num(row.abs_H_hat), num(row.bound), num(row.ratio)});
    return emit(t.render(fmt), out);
  });
}

wml_status wml_transform(wml_context* ctx, const char* variant, double arg, double* re, double* im, double* err) {
  return guarded(ctx, [&] {
    if (!variant) return WML_E_INVALID;
    wml::TransformValue v = wml::transform_eval(wml::parse_variant(variant), arg, ctx->params, ctx->tc);
    if (re) *re = v.value.re.to_double();
    if (im) *im = v.value.im.to_double();
    if (err) *err = v.error.to_double();
    return WML_OK;
  });
}

wml_status wml_transform_grid(wml_context* ctx, const char* variant, const double* args, size_t n, wml_format fmt,
                              char** out) {
  return guarded(ctx, [&] {
    if (!variant || (!args && n) || !valid_format(fmt)) return WML_E_INVALID;
    wml::KernelVariant v = wml::parse_variant(variant);
    std::vector<double> a(args, args + n);
    // independent chunks on the worker pool; each chunk shares one quadrature
    int jobs = std::max(1, std::min<int>(ctx->jobs, static_cast<int>(n)));
    std::size_t chunk = (n + jobs - 1) / std::max(jobs, 1);
    std::size_t nchunks = n ? (n + chunk - 1) / chunk : 0;
    auto parts = wml::parallel_map(nchunks, jobs, [&](std::size_t c) {
      std::vector<double> sub(a.begin() + c * chunk, a.begin() + std::min(n, (c + 1) * chunk));
      return wml::transform_grid(v, sub, ctx->params, ctx->tc);
    });
    Table t;
    t.columns = {v == wml::KernelVariant::hol ? "k" : "t", "re", "im", "error_estimate"};
    for (auto& g : parts) {
      for (auto& r : g.rows) t.rows.push_back({num(r.arg), num(r.value.re), num(r.value.im), num(r.error, 3)});
    }
    return emit(t.render(fmt), out);
  });
}

wml_status wml_stationary(wml_context* ctx, const double* ts, size_t n, wml_format fmt, char** out) {
  return guarded(ctx, [&] {
    if ((!ts && n) || !valid_format(fmt)) return WML_E_INVALID;
    Table t;
    t.columns = {"t", "y_located", "y_predicted", "rel_deviation", "window_lo", "window_hi", "window_extended",
                 "grid_points"};
    for (size_t i = 0; i < n; ++i) {
      wml::StationaryPointResult r = wml::locate_stationary_point(ts[i], ctx->params, ctx->tc);
      t.rows.push_back({num(r.t), num(r.y_located), num(r.y_predicted), num(r.rel_deviation), num(r.window_lo),
                        num(r.window_hi), r.window_extended ? "1" : "0", std::to_string(r.grid_points)});
    }
    return emit(t.render(fmt), out);
  });
}

wml_status wml_oscillation(wml_context* ctx, double t1, double t2, long T, wml_format fmt, char** out) {
  return guarded(ctx, [&] {
    if (!valid_format(fmt)) return WML_E_INVALID;
    wml::OscillationResult r = wml::oscillation_sum(t1, t2, T, ctx->params.L, ctx->tc, ctx->jobs);
    Table t;
    t.columns = {"t1", "t2", "T", "L", "re", "im", "budget", "terms"};
    t.rows.push_back({num(t1), num(t2), std::to_string(T), std::to_string(ctx->params.L), num(r.value.re),
                      num(r.value.im), num(r.budget, 3), std::to_string(r.terms)});
    return emit(t.render(fmt), out);
  });
}

wml_status wml_mainterm(wml_context* ctx, double radius, int nodes, wml_format fmt, char** out) {
  return guarded(ctx, [&] {
    if (!valid_format(fmt)) return WML_E_INVALID;
    wml::MainTermResult r = wml::main_term_limit(ctx->params, radius, nodes, ctx->tc, ctx->jobs, true);
    Table t;
    t.columns = {"K", "L", "radius", "nodes", "re", "im", "stability", "quad_error"};
    t.rows.push_back({std::to_string(ctx->params.K), std::to_string(ctx->params.L), num(r.radius),
                      std::to_string(r.nodes), num(r.value.re), num(r.value.im), num(r.stability),
                      num(r.quad_error, 3)});
    return emit(t.render(fmt), out);
  });
}

wml_status wml_moments_compute(wml_context* ctx, long k_min, long k_max, wml_moment_table** out) {
  return guarded(ctx, [&] {
    if (!out) return WML_E_INVALID;
    auto* m = new wml_moment_table;
    try {
      m->table = wml::moment_table(k_min, k_max, ctx->tc.cfg, ctx->jobs);
    } catch (...) {
      delete m;
      throw;
    }
    *out = m;
    return WML_OK;
  });
}

void wml_moments_destroy(wml_moment_table* table) { delete table; }

wml_status wml_moments_emit(wml_context* ctx, const wml_moment_table* table, wml_format fmt, char** out) {
  return guarded(ctx, [&] {
    if (!table || !valid_format(fmt)) return WML_E_INVALID;
    if (fmt == WML_FORMAT_JSON) {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (auto& r : table->table.rows) {
        nlohmann::ordered_json o;
        o["k"] = r.k;
        o["dim"] = r.dim;
        std::vector<std::string> c, a;
        for (auto& x : r.central) c.push_back(num(x));
        for (auto& x : r.adjoint) a.push_back(num(x));
        o["central"] = c;
        o["adjoint"] = a;
        o["M4"] = num(r.m4);
        arr.push_back(o);
      }
      return emit(arr.dump(2) + "\n", out);
    }
    // one line per weight; the L-value lists are ';'-separated
    std::string s = "k,dim,central,adjoint,M4\n";
    for (auto& r : table->table.rows) {
      std::string c, a;
      for (std::size_t i = 0; i < r.central.size(); ++i) {
        c += (i ? ";" : "") + num(r.central[i]);
        a += (i ? ";" : "") + num(r.adjoint[i]);
      }
      s += std::to_string(r.k) + "," + std::to_string(r.dim) + "," + c + "," + a + "," + num(r.m4) + "\n";
    }
    return emit(s, out);
  });
}

wml_status wml_dyadic_stats(wml_context* ctx, const wml_moment_table* table, long T, double V, double* S,
                            double* S_star) {
  return guarded(ctx, [&] {
    if (!table) return WML_E_INVALID;
    wml::DyadicStats st = wml::dyadic_stats(table->table, T, V);
    if (S) *S = st.S.to_double();
    if (S_star) *S_star = st.S_star.to_double();
    return WML_OK;
  });
}

wml_status wml_density_count(wml_context* ctx, const wml_moment_table* table, long T, double V, long* count) {
  return guarded(ctx, [&] {
    if (!table || !count) return WML_E_INVALID;
    *count = wml::density_count(table->table, T, V);
    return WML_OK;
  });
}

wml_status wml_stats_emit(wml_context* ctx, const wml_moment_table* table, long T, const double* V, size_t n,
                          wml_format fmt, char** out) {
  return guarded(ctx, [&] {
    if (!table || (!V && n) || !valid_format(fmt)) return WML_E_INVALID;
    Table t;
    t.columns = {"T", "V", "S", "S_star", "density_count", "density_range", "theta"};
    for (size_t i = 0; i < n; ++i) {
      wml::DyadicStats st = wml::dyadic_stats(table->table, T, V[i]);
      long c = wml::density_count(table->table, T, V[i]);
      t.rows.push_back({std::to_string(T), num(V[i]), num(st.S), num(st.S_star), std::to_string(c),
                        std::to_string(wml::density_range(T, V[i])), num(wml::selberg_theta)});
    }
    return emit(t.render(fmt), out);
  });
}

wml_status wml_spectral_load(wml_context* ctx, const char* path, wml_spectral_data** out) {
  return guarded(ctx, [&] {
    if (!path || !out) return WML_E_INVALID;
    auto* d = new wml_spectral_data;
    try {
      d->data = wml::load_spectral_data(path);
    } catch (...) {
      delete d;
      throw;
    }
    *out = d;
    return WML_OK;
  });
}

void wml_spectral_destroy(wml_spectral_data* data) { delete data; }

size_t wml_spectral_rows(const wml_spectral_data* data) { return data ? data->data.rows.size() : 0; }

wml_status wml_reciprocity(wml_context* ctx, const wml_spectral_data* data, double t_cap, long k_cap,
                           double tail_mass, char** out) {
  return guarded(ctx, [&] {
    if (!data) return WML_E_INVALID;
    wml::ReportOptions opt;
    if (t_cap > 0) opt.t_cap = t_cap;
    if (k_cap > 0) opt.k_cap = k_cap;
    if (tail_mass >= 0) opt.tail_mass = tail_mass;
    opt.jobs = ctx->jobs;
    wml::ReciprocityReport r = wml::reciprocity_report(ctx->params, data->data, ctx->tc, opt);
    return emit(r.to_json(), out);
  });
}

wml_status wml_check(wml_context* ctx, const char* module, char** out) {
  return guarded(ctx, [&] {
    if (!module) return WML_E_INVALID;
    wml::checks::Settings s{ctx->params, ctx->tc, ctx->jobs};
    std::vector<wml::checks::Result> results = wml::checks::run(module, s);
    std::string text;
    bool ok = true;
    for (auto& r : results) {
      text += std::string(r.pass ? "PASS " : "FAIL ") + r.name + (r.detail.empty() ? "" : ": " + r.detail) + "\n";
      ok = ok && r.pass;
    }
    if (out) *out = dup(text);
    return ok ? WML_OK : WML_E_CHECK;
  });
}

}  // extern "C"
