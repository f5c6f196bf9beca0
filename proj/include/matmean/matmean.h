/*
 * matmean C API.
 *
 * Every handle is opaque and owned by the caller once returned; release it
 * with the matching *_free function. Functions return MM_OK or an error
 * status; the message for the most recent failure on the calling thread is
 * available from mm_last_error(). Strings returned through char** outputs
 * are heap-allocated and must be released with mm_string_free().
 */
#ifndef MATMEAN_MATMEAN_H_
#define MATMEAN_MATMEAN_H_

#include <stddef.h>

#if defined(_WIN32)
#define MM_API __declspec(dllexport)
#else
#define MM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mm_status {
  MM_OK = 0,
  MM_ERR_INVALID_ARGUMENT = 1,
  MM_ERR_NOT_SQUARE = 2,
  MM_ERR_NOT_POSITIVE_DEFINITE = 3,
  MM_ERR_DIMENSION_MISMATCH = 4,
  MM_ERR_NON_POSITIVE_RESULT = 5,
  MM_ERR_SINGULAR_CONGRUENCE = 6,
  MM_ERR_WEIGHT = 7,
  MM_ERR_MAX_DEPTH_EXCEEDED = 8,
  MM_ERR_MAX_ITERS_EXCEEDED = 9,
  MM_ERR_INSUFFICIENT_STEPS = 10,
  MM_ERR_UNSTABLE_ESTIMATE = 11,
  MM_ERR_PARSE = 12,
  MM_ERR_IO = 13,
  MM_ERR_INTERNAL = 14
} mm_status;

typedef enum mm_method { MM_METHOD_ALM = 0, MM_METHOD_BMP = 1 } mm_method;

typedef struct mm_matrix mm_matrix;
typedef struct mm_kernel mm_kernel;
typedef struct mm_trace mm_trace;

typedef struct mm_weighted_config {
  double tol;
  int max_depth;
  int dyadic_shortcut;
} mm_weighted_config;

typedef struct mm_multi_config {
  double tol;
  int max_iters;
  int max_n;
  int parallel;
  mm_weighted_config inner;
} mm_multi_config;

MM_API const char* mm_version(void);
MM_API const char* mm_status_name(mm_status status);
/* Message of the last failed call on this thread ("" if none). */
MM_API const char* mm_last_error(void);
MM_API void mm_string_free(char* s);

MM_API void mm_weighted_config_default(mm_weighted_config* cfg);
MM_API void mm_multi_config_default(mm_multi_config* cfg);

/* ---- matrices ---------------------------------------------------------- */

/* Validates and symmetrizes a row-major dim x dim array. */
MM_API mm_status mm_matrix_create(int dim, const double* row_major,
                                  mm_matrix** out);
/* Loads a matrix file: {"dim": r, "data": [...], "label": "..."}. */
MM_API mm_status mm_matrix_load(const char* path, mm_matrix** out);
MM_API mm_status mm_matrix_parse(const char* json_text, mm_matrix** out);
MM_API void mm_matrix_free(mm_matrix* m);
MM_API int mm_matrix_dim(const mm_matrix* m);
/* Copies dim*dim row-major entries into out (len must be >= dim*dim). */
MM_API mm_status mm_matrix_data(const mm_matrix* m, double* out, size_t len);
/* Label from the file or NULL. Owned by the handle. */
MM_API const char* mm_matrix_label(const mm_matrix* m);
MM_API mm_status mm_matrix_set_label(mm_matrix* m, const char* label);
/* 1 if the loaded data was asymmetric beyond 1e-9 relative. */
MM_API int mm_matrix_asymmetry_warning(const mm_matrix* m);
/* Matrix file text, reals at 17 significant digits. */
MM_API mm_status mm_matrix_to_json(const mm_matrix* m, char** out);

/* ---- kernels ----------------------------------------------------------- */

/* "arithmetic", "harmonic", "geometric", "logarithmic", "kfamily:<k>",
   "square". */
MM_API mm_status mm_kernel_parse(const char* name, mm_kernel** out);
MM_API void mm_kernel_free(mm_kernel* k);
MM_API const char* mm_kernel_label(const mm_kernel* k);

/* ---- means ------------------------------------------------------------- */

MM_API mm_status mm_mean2(const mm_kernel* kernel, const mm_matrix* a,
                          const mm_matrix* b, mm_matrix** out);

/* Weighted mean M_t(A, B). cfg may be NULL for defaults. When trace_json is
   non-NULL it receives the step trace (also on MM_ERR_MAX_DEPTH_EXCEEDED);
   full_trace adds the iterates. */
MM_API mm_status mm_weighted_mean(const mm_kernel* kernel, double t,
                                  const mm_matrix* a, const mm_matrix* b,
                                  const mm_weighted_config* cfg,
                                  int full_trace, mm_matrix** out,
                                  char** trace_json);

/* n-variable ALM or BMP mean. cfg may be NULL. When trace is non-NULL it
   receives the outer iteration trace, including on
   MM_ERR_MAX_ITERS_EXCEEDED. */
MM_API mm_status mm_nmean(mm_method method, const mm_kernel* kernel,
                          const mm_matrix* const* xs, size_t n,
                          const mm_multi_config* cfg, mm_matrix** out,
                          mm_trace** trace);

/* ---- traces ------------------------------------------------------------ */

MM_API void mm_trace_free(mm_trace* t);
MM_API size_t mm_trace_steps(const mm_trace* t);
MM_API int mm_trace_converged(const mm_trace* t);
/* Lyapunov quantities of a step: a, e and r_diam. Any pointer may be NULL. */
MM_API mm_status mm_trace_step(const mm_trace* t, size_t step, double* a,
                               double* e, double* r_diam);
MM_API mm_status mm_trace_to_json(const mm_trace* t, int full, char** out);
MM_API mm_status mm_trace_load(const char* path, mm_trace** out);
/* Per-step centroid drift for "arithmetic", "harmonic" or "square"
   isometries, as a JSON array. */
MM_API mm_status mm_trace_centroid_drift(const mm_trace* t,
                                         const char* pullback, char** out);

/* ---- diagnostics ------------------------------------------------------- */

/* Convergence-order report for one converged trace (needs iterates). */
MM_API mm_status mm_estimate_order(const mm_trace* t, int window,
                                   char** report_json);

/* Runs one verification check and returns its JSON report. check is one of
   "sandwich", "trace-ineq", "centroid", "order", "b2"; options_json is a
   JSON object (may be NULL) with any of: kernel, samples, dim, seed, t, k,
   method, n, max_r, runs, window, stencil_eps, tol, max_iters. */
MM_API mm_status mm_verify(const char* check, const char* options_json,
                           char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* MATMEAN_MATMEAN_H_ */
