#ifndef WML_WML_H
#define WML_WML_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define WML_API __attribute__((visibility("default")))
#else
#define WML_API
#endif

typedef enum wml_status {
  WML_OK = 0,
  WML_E_INVALID = 2,      /* bad argument or parameter combination */
  WML_E_DOMAIN = 3,       /* argument outside the supported range */
  WML_E_POLE = 4,         /* evaluation at or too close to a pole */
  WML_E_CONVERGENCE = 5,  /* series, quadrature or stability check failed */
  WML_E_OVERFLOW = 6,
  WML_E_SCHEMA = 7,       /* malformed input file */
  WML_E_IO = 8,
  WML_E_PRECISION = 9,    /* result not resolvable at the requested digits */
  WML_E_CHECK = 10,       /* an invariant check failed */
  WML_E_INTERNAL = 11
} wml_status;

typedef enum wml_format { WML_FORMAT_CSV = 0, WML_FORMAT_JSON = 1 } wml_format;

/* Opaque handles. */
typedef struct wml_context wml_context;
typedef struct wml_moment_table wml_moment_table;
typedef struct wml_spectral_data wml_spectral_data;

WML_API const char* wml_version(void);
WML_API const char* wml_status_name(wml_status status);

/* Context: test-function parameters, precision, transform settings, worker count.
   Defaults: K = 12, L = 2, digits = 50, sigma = 1/2, automatic tau_max, jobs = logical cores. */
WML_API wml_status wml_context_create(wml_context** out);
WML_API void wml_context_destroy(wml_context* ctx);
/* Message of the last failing call on this context; empty when none. */
WML_API const char* wml_last_error(const wml_context* ctx);

WML_API wml_status wml_set_params(wml_context* ctx, long K, long L);
/* Sets digits and the derived tolerances 10^-(digits-10) and 10^-(digits+10). */
WML_API wml_status wml_set_digits(wml_context* ctx, int digits);
WML_API wml_status wml_set_tolerances(wml_context* ctx, double quad_rel_tol, double tail_threshold);
WML_API wml_status wml_set_transform(wml_context* ctx, double sigma, double tau_max, int order);
WML_API wml_status wml_set_jobs(wml_context* ctx, int jobs);

/* Strings returned through char** are owned by the caller. */
WML_API void wml_string_free(char* s);

/* i^k h_hol(k). */
WML_API wml_status wml_testfn_weight(wml_context* ctx, long k, double* value);
/* Rows (k, i^k h_hol(k)) over the support, or (k, exact, product, rel_diff) for "compare". */
WML_API wml_status wml_testfn_emit(wml_context* ctx, const char* what, wml_format fmt, char** out);

/* Rows (tau, abs_Hhat, regime_bound, ratio) of |H_hat(sigma + i tau)| against its regime bound. */
WML_API wml_status wml_regime_emit(wml_context* ctx, const double* tau, size_t n, wml_format fmt, char** out);

/* variant: "plus", "minus" or "hol"; args are t values or weights k. */
WML_API wml_status wml_transform(wml_context* ctx, const char* variant, double arg, double* re, double* im,
                                 double* err);
WML_API wml_status wml_transform_grid(wml_context* ctx, const char* variant, const double* args, size_t n,
                                      wml_format fmt, char** out);

WML_API wml_status wml_stationary(wml_context* ctx, const double* t, size_t n, wml_format fmt, char** out);
WML_API wml_status wml_oscillation(wml_context* ctx, double t1, double t2, long T, wml_format fmt, char** out);
WML_API wml_status wml_mainterm(wml_context* ctx, double radius, int nodes, wml_format fmt, char** out);

WML_API wml_status wml_moments_compute(wml_context* ctx, long k_min, long k_max, wml_moment_table** out);
WML_API void wml_moments_destroy(wml_moment_table* table);
WML_API wml_status wml_moments_emit(wml_context* ctx, const wml_moment_table* table, wml_format fmt, char** out);
/* Dyadic sums over T <= k <= 2T: S (M >= V) and S* (V <= M <= 2V). */
WML_API wml_status wml_dyadic_stats(wml_context* ctx, const wml_moment_table* table, long T, double V, double* S,
                                    double* S_star);
WML_API wml_status wml_density_count(wml_context* ctx, const wml_moment_table* table, long T, double V, long* count);
/* Statistics table over the V grid, including the density range of each V. */
WML_API wml_status wml_stats_emit(wml_context* ctx, const wml_moment_table* table, long T, const double* V, size_t n,
                                  wml_format fmt, char** out);

WML_API wml_status wml_spectral_load(wml_context* ctx, const char* path, wml_spectral_data** out);
WML_API void wml_spectral_destroy(wml_spectral_data* data);
WML_API size_t wml_spectral_rows(const wml_spectral_data* data);

/* Reciprocity report as JSON. t_cap <= 0 and k_cap <= 0 select the defaults. */
WML_API wml_status wml_reciprocity(wml_context* ctx, const wml_spectral_data* data, double t_cap, long k_cap,
                                   double tail_mass, char** out);

/* Invariant suite of one module ("testfn", "transform", "stationary", "oscillation", "mainterm",
   "moments", "reciprocity", "stats") or "all". Writes a line per check; WML_E_CHECK when any fails. */
WML_API wml_status wml_check(wml_context* ctx, const char* module, char** out);

#ifdef __cplusplus
}
#endif

#endif
