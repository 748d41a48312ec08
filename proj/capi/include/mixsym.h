/*
 * mixsym: semiparametric estimation of k-component location mixtures of a
 * common symmetric distribution.
 *
 * C interface to the shared library.  All functions return MIXSYM_OK on
 * success and a nonzero status otherwise; mixsym_last_error() describes the
 * most recent failure on the calling thread.  Objects returned through
 * out-parameters are opaque handles owned by the caller and released with
 * the matching *_free function.  Strings returned through char** are
 * heap-allocated and released with mixsym_string_free().
 */

#ifndef MIXSYM_H_
#define MIXSYM_H_

#include <stddef.h>
#include <stdint.h>

#if defined _WIN32 || defined __CYGWIN__
  #define MIXSYM_API __declspec(dllexport)
#else
  #define MIXSYM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  MIXSYM_OK = 0,
  MIXSYM_ERROR_INVALID = 1,     /* bad argument or precondition violation */
  MIXSYM_ERROR_IO = 2,          /* file could not be read or parsed */
  MIXSYM_ERROR_FIT = 3,         /* estimator failed to produce a result */
  MIXSYM_ERROR_SINGULAR = 4,    /* deconvolution blocked by lambda1 ~ 1/2 */
  MIXSYM_ERROR_UNSUPPORTED = 5, /* feature outside the supported range */
  MIXSYM_ERROR_INTERNAL = 6
} mixsym_status;

typedef struct mixsym_sample_s mixsym_sample;
typedef struct mixsym_fit_result_s mixsym_fit_result;
typedef struct mixsym_curve_s mixsym_curve;

MIXSYM_API const char* mixsym_version(void);

/* Message for the last failing call on this thread; empty if none. */
MIXSYM_API const char* mixsym_last_error(void);

MIXSYM_API void mixsym_string_free(char* s);

/* ---- samples ---- */

MIXSYM_API mixsym_status mixsym_sample_create(const double* values, size_t n,
                                              mixsym_sample** out);

/* One numeric value per line; '#' lines are comments. */
MIXSYM_API mixsym_status mixsym_sample_read_csv(const char* path,
                                                mixsym_sample** out);

MIXSYM_API size_t mixsym_sample_size(const mixsym_sample* sample);

/* Copies the sorted values into caller storage of capacity cap. */
MIXSYM_API mixsym_status mixsym_sample_values(const mixsym_sample* sample,
                                              double* out, size_t cap);

MIXSYM_API void mixsym_sample_free(mixsym_sample* sample);

/* ---- fitting ---- */

typedef struct {
  int max_iterations;   /* per start, default 500 */
  double tolerance;     /* simplex diameter / spread, default 1e-8 */
  double p;             /* distance exponent, default 2; HUGE_VAL = sup */
  uint64_t seed;        /* reserved for randomized restarts */
  /* Optional explicit location starts (n_starts rows of k columns,
     row-major); NULL selects the quantile-pair protocol. */
  const double* starts;
  size_t n_starts;
} mixsym_fit_options;

MIXSYM_API void mixsym_fit_options_init(mixsym_fit_options* opts);

/* Asymmetry-distance fit for k in {1, 2, 3}. */
MIXSYM_API mixsym_status mixsym_fit_sp(const mixsym_sample* sample, int k,
                                       const mixsym_fit_options* opts,
                                       mixsym_fit_result** out);

/* Equal-variance two-component normal mixture by EM (the baseline). */
MIXSYM_API mixsym_status mixsym_fit_nmle(const mixsym_sample* sample,
                                         const mixsym_fit_options* opts,
                                         mixsym_fit_result** out);

MIXSYM_API int mixsym_fit_components(const mixsym_fit_result* fit);

/* lambda and mu must hold k entries each. */
MIXSYM_API mixsym_status mixsym_fit_params(const mixsym_fit_result* fit,
                                           double* lambda, double* mu);

MIXSYM_API double mixsym_fit_objective(const mixsym_fit_result* fit);
MIXSYM_API double mixsym_fit_sigma2(const mixsym_fit_result* fit);

MIXSYM_API mixsym_status mixsym_fit_to_json(const mixsym_fit_result* fit,
                                            char** json);

/* Rebuilds the parameter part of a fit from its JSON document (used to feed
   a previously saved fit into the deconvolution). */
MIXSYM_API mixsym_status mixsym_fit_from_json(const char* json,
                                              mixsym_fit_result** out);

MIXSYM_API void mixsym_fit_result_free(mixsym_fit_result* fit);

/* ---- distances ---- */

/* d_n(lambda, mu) for the given p (HUGE_VAL = sup norm). */
MIXSYM_API mixsym_status mixsym_dn(const mixsym_sample* sample, int k,
                                   const double* lambda, const double* mu,
                                   double p, double* out);

/* ---- deconvolution ---- */

/* Component-CDF estimate for a two-component fit; fails with
   MIXSYM_ERROR_SINGULAR when lambda1 is within 1e-6 of 1/2.  isotonic != 0
   additionally applies the monotone envelope (plotting aid); the
   monotone-violation diagnostic always refers to the raw curve. */
MIXSYM_API mixsym_status mixsym_estimate_g0(const mixsym_sample* sample,
                                            const double lambda[2],
                                            const double mu[2], int isotonic,
                                            mixsym_curve** out);

MIXSYM_API size_t mixsym_curve_size(const mixsym_curve* curve);
MIXSYM_API mixsym_status mixsym_curve_point(const mixsym_curve* curve, size_t i,
                                            double* t, double* value);
MIXSYM_API double mixsym_curve_monotone_violation(const mixsym_curve* curve);
MIXSYM_API mixsym_status mixsym_curve_to_csv(const mixsym_curve* curve, char** csv);
MIXSYM_API void mixsym_curve_free(mixsym_curve* curve);

/* ---- identifiability ---- */

/* JSON verdict with member flag, reason tag and (c, d, r) witness. */
MIXSYM_API mixsym_status mixsym_identifiability_json(int k, const double* lambda,
                                                     const double* mu,
                                                     char** json);

/* ---- bootstrap ---- */

/* method is "sp" or "nmle"; k = 2 fits only.  Writes a JSON report with the
   point estimate, per-parameter standard errors and the failure count, and
   (when table is non-NULL) an aligned "estimate (SE)" text table. */
MIXSYM_API mixsym_status mixsym_bootstrap_json(const mixsym_sample* sample,
                                               const char* method, int B,
                                               uint64_t seed,
                                               const mixsym_fit_options* opts,
                                               char** json, char** table);

/* ---- simulation ---- */

/* Validates a scenario JSON document and reports its seed and replication
   count (for output file naming). */
MIXSYM_API mixsym_status mixsym_scenario_info(const char* scenario_json,
                                              uint64_t* seed,
                                              int* replications);

/* Runs the scenario described by a JSON document; returns the per-replication
   result table as CSV and the summary as JSON.  replications_override > 0
   replaces the scenario's replication count (the full-scale switch). */
MIXSYM_API mixsym_status mixsym_run_scenario(const char* scenario_json,
                                             int replications_override,
                                             char** rows_csv,
                                             char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* MIXSYM_H_ */
