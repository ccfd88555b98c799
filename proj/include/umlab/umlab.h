/* C interface to the umlab library. All handles are opaque; every function
 * returning umlab_status leaves a message retrievable by umlab_last_error()
 * (thread local) when it fails. Strings returned through char** are owned by
 * the caller and released with umlab_string_free. */
#ifndef UMLAB_UMLAB_H
#define UMLAB_UMLAB_H

#include <stdint.h>

#if defined(UMLAB_BUILDING_LIBRARY)
#define UMLAB_API __attribute__((visibility("default")))
#else
#define UMLAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum umlab_status {
  UMLAB_OK = 0,
  UMLAB_ERR_INVALID_ARGUMENT = 1,
  UMLAB_ERR_DOMAIN = 2,
  UMLAB_ERR_NONCONVERGENCE = 3,
  UMLAB_ERR_BUDGET = 4,
  UMLAB_ERR_DEGENERATE = 5,
  UMLAB_ERR_HYPOTHESIS = 6,
  UMLAB_ERR_IO = 7,
  UMLAB_ERR_INTERNAL = 99
} umlab_status;

typedef struct umlab_symbol umlab_symbol;
typedef struct umlab_domains umlab_domains;
typedef struct umlab_growth umlab_growth;
typedef struct umlab_grid umlab_grid;

UMLAB_API const char* umlab_version(void);
UMLAB_API const char* umlab_last_error(void);
UMLAB_API void umlab_string_free(char* s);

/* Symbols */
UMLAB_API umlab_status umlab_symbol_from_id(const char* id, int d, umlab_symbol** out);
UMLAB_API umlab_status umlab_symbol_from_json(const char* json, umlab_symbol** out);
UMLAB_API void umlab_symbol_free(umlab_symbol* s);
UMLAB_API int umlab_symbol_dimension(const umlab_symbol* s);
UMLAB_API umlab_status umlab_symbol_name(const umlab_symbol* s, char** out);
UMLAB_API umlab_status umlab_symbol_eval(const umlab_symbol* s, const double* xi, double* out);
UMLAB_API umlab_status umlab_symbol_rotate_to_pole(const umlab_symbol* s, const double* p, umlab_symbol** out);
/* phi(u) = Phi(u, 1); grad has d-1 entries, hess (d-1)^2 row-major. Either may be NULL. */
UMLAB_API umlab_status umlab_chart_phase_eval(const umlab_symbol* s, const double* u, double* value,
                                              double* grad, double* hess);
/* JSON: {"schema_version", "points": [{"location", "kind", "value", "eigenvalues"}], "morse", "search_failed", ...} */
UMLAB_API umlab_status umlab_symbol_critical_points_json(const umlab_symbol* s, int n_starts, double tol,
                                                         char** json_out);
UMLAB_API umlab_status umlab_spherical_mean(const umlab_symbol* s, double t, double tol, double* re,
                                            double* im);

/* Phase geometry on the chart phase of s. */
UMLAB_API umlab_status umlab_schur_det(int n, const double* h_row_major, const double* x_minus, double* out);
UMLAB_API umlab_status umlab_solve_critical(const umlab_symbol* s, const double* x, const double* xi_init,
                                            double tol, int max_iter, double* xi_out, double* det,
                                            int* signature, int* iterations, double* residual);
UMLAB_API umlab_status umlab_critical_closed_form_2d(const umlab_symbol* s, const double* x, double* xi_out);
/* seed_offset may be NULL (default 0.1 e_1). */
UMLAB_API umlab_status umlab_domains_build(const umlab_symbol* s, const double* seed_offset, double shrink,
                                           umlab_domains** out);
UMLAB_API umlab_status umlab_domains_from_json(const char* json, umlab_domains** out);
UMLAB_API umlab_status umlab_domains_to_json(const umlab_domains* dom, char** out);
UMLAB_API umlab_status umlab_domains_in_u1(const umlab_symbol* s, const umlab_domains* dom, const double* x,
                                           int* inside);
UMLAB_API void umlab_domains_free(umlab_domains* dom);

/* Oscillatory integrals: built-in fixtures "quadratic1d", "quadratic2d",
 * "saddle2d", "vanishing1d", "vanishing2d". */
typedef struct umlab_decay_row {
  double t;
  double direct_re, direct_im;
  double approx_re, approx_im;
  double abs_err;
} umlab_decay_row;

/* rows must hold n_t entries. */
UMLAB_API umlab_status umlab_decay_check(const char* fixture, const double* t_list, int n_t, double tol,
                                         umlab_decay_row* rows, double* slope, double* bound, int* pass);

/* One row of the decay table, for callers that want partial results. */
UMLAB_API umlab_status umlab_decay_fixture_dim(const char* fixture, int* dim);
UMLAB_API umlab_status umlab_decay_row_eval(const char* fixture, double t, double tol, umlab_decay_row* row);

/* Multiplier application. */
UMLAB_API umlab_status umlab_apply_pointwise(const umlab_symbol* s, const double* center, double eps, double t,
                                             const double* x, double tol, double* re, double* im);
UMLAB_API umlab_status umlab_grid_from_bump(int d, const double* center, double eps, const double* extents,
                                            const int* counts, umlab_grid** out);
UMLAB_API umlab_status umlab_grid_apply(const umlab_symbol* s, const umlab_grid* f_hat, double t,
                                        umlab_grid** out);
UMLAB_API umlab_status umlab_grid_l2(const umlab_grid* g, double* out);
/* Writes the binary grid to path and its JSON sidecar to path + ".json". */
UMLAB_API umlab_status umlab_grid_write(const umlab_grid* g, const char* path);
UMLAB_API void umlab_grid_free(umlab_grid* g);

UMLAB_API umlab_status umlab_fit_exponent(const double* t, const double* values, int n, double* slope,
                                          double* intercept, double* residual_rms);
/* Plain least squares on (log t, log value); no span requirement. */
UMLAB_API umlab_status umlab_loglog_fit(const double* t, const double* values, int n, double* slope,
                                        double* intercept, double* residual_rms);
UMLAB_API umlab_status umlab_dual_exponent(double p, double* p_prime, double* p_star, double* measured);

/* Growth pipeline. */
typedef struct umlab_lower_bound {
  double t;
  double p;
  double surrogate;
  double integral;
  double std_error;
  int n_samples;
  int hits;
  int quad_failures;
} umlab_lower_bound;

UMLAB_API umlab_status umlab_growth_prepare(const umlab_symbol* s, double shrink, umlab_growth** out);
UMLAB_API umlab_status umlab_growth_setup_json(const umlab_growth* g, char** out);
/* Fixes the quasi-random sample of U used by umlab_growth_evaluate. */
UMLAB_API umlab_status umlab_growth_sample(umlab_growth* g, int n_samples, uint64_t seed, int threads, int* hits);
UMLAB_API umlab_status umlab_growth_evaluate(const umlab_growth* g, double t, double p, double quad_tol,
                                             int threads, umlab_lower_bound* out);
UMLAB_API umlab_status umlab_growth_bump_lp_norm(const umlab_growth* g, double p, double* out);
UMLAB_API void umlab_growth_free(umlab_growth* g);

#ifdef __cplusplus
}
#endif

#endif
