#ifndef EVCOP_EVCOP_H
#define EVCOP_EVCOP_H

/* C interface to the evcop library: nonparametric extreme-value copulas
 * fitted through a penalized spline model of the Williamson generator.
 *
 * All functions return an evcop_status. On failure a message is available
 * from evcop_last_error() until the next call on the same thread.
 * Objects are opaque handles released with the matching *_free function. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define EVCOP_API __declspec(dllexport)
#else
#define EVCOP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum evcop_status {
  EVCOP_OK = 0,
  EVCOP_ERR_INPUT = 2,     /* malformed data, bad arguments, unreadable files */
  EVCOP_ERR_NUMERICAL = 3, /* a numerical procedure failed */
  EVCOP_ERR_INTERNAL = 4
} evcop_status;

typedef struct evcop_model evcop_model;

typedef struct evcop_fit_options {
  int dim;            /* spline parameters, default 13 */
  int degree;         /* default 3 */
  double lambda;      /* curvature penalty, default 1e-4 */
  int grid_k;         /* interior likelihood grid nodes, default 78 */
  int flip_heuristic; /* nonzero: apply the mode heuristic (default 1) */
  int pseudo;         /* nonzero: rank-transform the data first */
  int survival;       /* nonzero: fit the copula of (1-U, 1-V) */
  int max_iter;       /* default 500 */
  uint64_t seed;      /* recorded; the fit itself is deterministic */
} evcop_fit_options;

typedef struct evcop_measures {
  double gini_pickands;
  double gini_density;
  double gini_copula;
  double blomqvist;
  double upper_tail;
  double fixed_point;
  double slope0;
  double slope1;
  double spectral_h0;
  double spectral_h1;
  double loglik;
  double lambda;
  int flipped;
  int converged;
  int iterations;
} evcop_measures;

typedef struct evcop_joint_options {
  double lower, upper; /* support of the shared margin, default [1, 100] */
  size_t n_out;        /* simulated pairs, default 1000 */
  uint64_t seed;
} evcop_joint_options;

EVCOP_API const char* evcop_version(void);
EVCOP_API const char* evcop_last_error(void);
EVCOP_API void evcop_string_free(char* s);

EVCOP_API void evcop_fit_options_default(evcop_fit_options* opts);
EVCOP_API void evcop_joint_options_default(evcop_joint_options* opts);

/* Fits to n rows of (u, v) stored row-major in uv[2n]. */
EVCOP_API evcop_status evcop_fit_pairs(const double* uv, size_t n, const evcop_fit_options* opts,
                                       evcop_model** out);
EVCOP_API evcop_status evcop_fit_csv(const char* path, const evcop_fit_options* opts, evcop_model** out);

EVCOP_API evcop_status evcop_model_load(const char* path, evcop_model** out);
EVCOP_API evcop_status evcop_model_from_json(const char* json, evcop_model** out);
EVCOP_API evcop_status evcop_model_save(const evcop_model* m, const char* path);
/* The returned string is released with evcop_string_free. */
EVCOP_API evcop_status evcop_model_to_json(const evcop_model* m, char** out);
EVCOP_API void evcop_model_free(evcop_model* m);

/* A(t) and its derivatives, order 0..2. */
EVCOP_API evcop_status evcop_model_pickands(const evcop_model* m, double t, int order, double* out);
EVCOP_API evcop_status evcop_model_cdf(const evcop_model* m, double u, double v, double* out);
EVCOP_API evcop_status evcop_model_pdf(const evcop_model* m, double u, double v, double* out);
EVCOP_API evcop_status evcop_model_measures(const evcop_model* m, evcop_measures* out);
/* Writes t,A,dA,d2A on n equispaced points. */
EVCOP_API evcop_status evcop_model_pickands_table(const evcop_model* m, size_t n, const char* path);

/* Writes n rows (u, v) row-major into out[2n]. */
EVCOP_API evcop_status evcop_model_simulate(const evcop_model* m, size_t n, uint64_t seed, double* out);
EVCOP_API evcop_status evcop_model_simulate_csv(const evcop_model* m, size_t n, uint64_t seed, const char* path);

/* Runs a study described by the JSON file at spec_path. Writes the per-run
 * results CSV and a summary CSV (either path may be NULL). The summary text is
 * returned in *summary when non-NULL; failures of single runs are counted
 * in *failures and are not errors. */
EVCOP_API evcop_status evcop_study_run(const char* spec_path, const char* results_path,
                                       const char* summary_path, char** summary, size_t* failures);

/* Joint model of an ordered pair (col1 >= col2): writes margin.json,
 * copula.json and sample.csv under out_dir. */
EVCOP_API evcop_status evcop_joint_run(const char* csv_path, const evcop_joint_options* opts,
                                       const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif
