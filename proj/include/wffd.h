/* C API for the WFFD rate/geometry/simulation library.
 *
 * All functions returning int yield WFFD_OK (0) on success or a WFFD_ERR_*
 * code; wffd_last_error() returns a thread-local message for the most recent
 * failure on the calling thread. Handles are created and released by the
 * caller; every wffd_*_free accepts NULL.
 */
#ifndef WFFD_H
#define WFFD_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define WFFD_API __declspec(dllexport)
#else
#define WFFD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
  WFFD_OK = 0,
  WFFD_ERR_INVALID = 1,     /* bad argument or broken invariant */
  WFFD_ERR_CONVERGENCE = 2, /* quadrature budget exhausted */
  WFFD_ERR_UNSUPPORTED = 3, /* model outside the supported family */
  WFFD_ERR_INTERNAL = 4
};

enum { WFFD_MODE_NCSI = 0, WFFD_MODE_RCSI = 1 };
enum { WFFD_NOISE_GAUSSIAN = 0, WFFD_NOISE_RESIDUAL = 1 };
enum {
  WFFD_METHOD_AUTO = 0,
  WFFD_METHOD_QUADRATURE = 1,
  WFFD_METHOD_MONTE_CARLO = 2
};

typedef struct wffd_constellation wffd_constellation;
typedef struct wffd_fading wffd_fading;

typedef struct wffd_channel_params {
  double P;
  double c;
} wffd_channel_params;

typedef struct wffd_rate_options {
  double quad_abs_tol;        /* <= 0 picks the default 1e-9 */
  double nested_tol;          /* <= 0 picks the default 1e-7 */
  long long max_subdivisions; /* <= 0 picks the default (2^21) */
  long long mc_budget;        /* <= 0 picks the default 200000 */
  long long fading_samples;   /* <= 0 picks the default 8000 */
  int batches;                /* <= 0 picks the default 40 */
  uint64_t seed;
  int method; /* WFFD_METHOD_* */
} wffd_rate_options;

typedef struct wffd_rate_result {
  double rate;
  double numeric_error;
  long long samples_used;
  int negative;    /* rate < 0 */
  char method[48]; /* description of the evaluation path */
  char note[160];
} wffd_rate_result;

typedef struct wffd_condition_report {
  double min_gap;
  int satisfied;
  long long witness_i;
  double witness_s;
  double witness_a;
  double witness_s_tilde;
  double witness_a_tilde;
  int mode; /* WFFD_MODE_* */
  char note[160];
} wffd_condition_report;

typedef struct wffd_region {
  long long input;
  int state_index;
  double state_point;
  double lo;
  double hi;
} wffd_region;

typedef struct wffd_gap_breakdown {
  double integer_restriction;
  double peak_restriction;
  double quantized_noise_entropy;
  double additive_constant;
  double total_claimed;
  int mode;
  char note[240];
} wffd_gap_breakdown;

typedef struct wffd_sim_config {
  long long n_symbols;
  uint64_t seed;
  int noise_mode; /* WFFD_NOISE_* */
  int mode;       /* WFFD_MODE_* */
  int jobs;
} wffd_sim_config;

typedef struct wffd_sim_result {
  double joint_error_rate;
  double state_error_rate;
  double input_error_rate;
  long long n;
  uint64_t seed;
  long long joint_errors;
  long long state_errors;
  long long input_errors;
} wffd_sim_result;

WFFD_API const char* wffd_last_error(void);
WFFD_API const char* wffd_error_name(int code);
WFFD_API void wffd_default_rate_options(wffd_rate_options* opts);

/* --- constellations ------------------------------------------------- */

WFFD_API int wffd_constellation_create(const double* points, const double* probs,
                                       size_t n, wffd_constellation** out);
WFFD_API int wffd_constellation_pam(int m, wffd_constellation** out);
WFFD_API int wffd_constellation_standardize(const wffd_constellation* in,
                                            wffd_constellation** out);
WFFD_API size_t wffd_constellation_size(const wffd_constellation* c);
WFFD_API int wffd_constellation_get(const wffd_constellation* c, double* points,
                                    double* probs);
WFFD_API double wffd_constellation_mean(const wffd_constellation* c);
WFFD_API double wffd_constellation_variance(const wffd_constellation* c);
/* JSON schema: {"points": [...], "probs": [...]} */
WFFD_API int wffd_constellation_from_json(const char* json, wffd_constellation** out);
WFFD_API int wffd_constellation_to_json(const wffd_constellation* c, char* buf,
                                        size_t cap, size_t* len);
WFFD_API void wffd_constellation_free(wffd_constellation* c);

/* --- fading models ---------------------------------------------------
 * JSON schema, discriminated by "type":
 *   {"type": "discrete_pmf", "points": [...], "probs": [...]}
 *   {"type": "uniform_interval", "mean": m, "half_width": w}
 *   {"type": "gaussian_law", "mean": m, "variance": v}
 */

WFFD_API int wffd_fading_discrete(const double* points, const double* probs, size_t n,
                                  wffd_fading** out);
WFFD_API int wffd_fading_uniform(double mean, double half_width, wffd_fading** out);
WFFD_API int wffd_fading_gaussian(double mean, double variance, wffd_fading** out);
WFFD_API int wffd_fading_degenerate(double value, wffd_fading** out);
WFFD_API int wffd_fading_standardize(const wffd_fading* in, wffd_fading** out);
WFFD_API double wffd_fading_mean(const wffd_fading* f);
WFFD_API double wffd_fading_variance(const wffd_fading* f);
WFFD_API int wffd_fading_from_json(const char* json, wffd_fading** out);
WFFD_API int wffd_fading_to_json(const wffd_fading* f, char* buf, size_t cap, size_t* len);
WFFD_API void wffd_fading_free(wffd_fading* f);

/* --- core numerics ---------------------------------------------------- */

WFFD_API int wffd_mixture_entropy(const double* means, const double* weights, size_t n,
                                  double sigma, double abs_tol, double* out_bits);
WFFD_API int wffd_discrete_entropy(const double* pmf, size_t n, double* out_bits);
WFFD_API double wffd_std_normal_cdf(double x);

/* --- channel sampling -------------------------------------------------- */

WFFD_API int wffd_sample_block(wffd_channel_params params, const wffd_constellation* state,
                               const wffd_fading* fading, const double* x, size_t n,
                               int noise_mode, uint64_t seed, double* y, double* a,
                               double* s);

/* --- rate engine -------------------------------------------------------- */

WFFD_API int wffd_awgn_capacity(double P, double* out_bits);
WFFD_API int wffd_gaussian_mismatch_loss(double P, double a, double k, double* out_bits);
/* state == NULL evaluates the Gaussian-state closed form. */
WFFD_API int wffd_costa_mismatch_rate(wffd_channel_params params, double k,
                                      const wffd_constellation* state,
                                      const wffd_rate_options* opts,
                                      wffd_rate_result* out);
WFFD_API int wffd_state_amplification_rate(wffd_channel_params params,
                                           const wffd_constellation* state,
                                           const wffd_fading* fading, int mode,
                                           const wffd_rate_options* opts,
                                           wffd_rate_result* out);
WFFD_API int wffd_outer_bound(wffd_channel_params params, const wffd_constellation* state,
                              const wffd_fading* fading, int mode,
                              const wffd_rate_options* opts, wffd_rate_result* out,
                              double* additive_constant,
                              wffd_condition_report* condition /* may be NULL */);
WFFD_API int wffd_no_csit_gaussian_rate(wffd_channel_params params,
                                        const wffd_constellation* state,
                                        const wffd_fading* fading,
                                        const wffd_rate_options* opts,
                                        wffd_rate_result* out);
/* per_alpha must hold n_alphas results; *best_index points at the winner. */
WFFD_API int wffd_linear_cancel_scan(wffd_channel_params params,
                                     const wffd_constellation* state,
                                     const wffd_fading* fading, const double* alphas,
                                     size_t n_alphas, const wffd_rate_options* opts,
                                     wffd_rate_result* per_alpha, size_t* best_index);
WFFD_API int wffd_identity_residual(wffd_channel_params params,
                                    const wffd_constellation* state,
                                    const wffd_fading* fading,
                                    const wffd_rate_options* opts, double* lhs,
                                    double* rhs);

/* --- separation geometry ------------------------------------------------ */

WFFD_API int wffd_ncsi_min_gap(wffd_channel_params params, const wffd_constellation* state,
                               const wffd_fading* fading, wffd_condition_report* out);
WFFD_API int wffd_rcsi_min_gap(wffd_channel_params params, const wffd_constellation* state,
                               const wffd_fading* fading, wffd_condition_report* out);
/* Call with regions == NULL to query the count. */
WFFD_API int wffd_pam_uniform_regions(wffd_channel_params params, double c, int m,
                                      double mu_A, wffd_region* regions, size_t cap,
                                      size_t* count);
WFFD_API int wffd_min_region_gap(const double* lo, const double* hi, size_t n,
                                 double* out_gap);

/* --- gap constants -------------------------------------------------------- */

typedef struct wffd_quantizer_entropy_terms {
  double center, near_terms, tail, total;
  double claimed_center, claimed_near, claimed_tail, claimed_total;
  int tail_over_covered;
} wffd_quantizer_entropy_terms;

WFFD_API double wffd_rho_z(long long i);
WFFD_API double wffd_quantized_noise_entropy(void);
WFFD_API void wffd_quantized_noise_entropy_terms(wffd_quantizer_entropy_terms* out);
WFFD_API double wffd_integer_restriction_gap(void);
WFFD_API int wffd_gap_breakdown_get(int mode, wffd_gap_breakdown* out);

/* --- decoding simulation ---------------------------------------------------- */

WFFD_API int wffd_run_decoding_sim(const wffd_sim_config* cfg, wffd_channel_params params,
                                   const wffd_constellation* x_const,
                                   const wffd_constellation* state,
                                   const wffd_fading* fading, wffd_sim_result* out);
WFFD_API double wffd_wilson_halfwidth(long long errors, long long n);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* WFFD_H */
