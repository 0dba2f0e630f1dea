/* dtlab — diffusion-transport laboratory.
 *
 * C interface to the solver library: state laws, increasing substitutions,
 * displacement kernels, and complete scenario runs with their verification
 * reports. All functions return a dtl_status (DTL_OK on success); the
 * thread-local message from dtl_last_error() describes the most recent
 * failure on the calling thread. Objects returned through out-parameters
 * are owned by the caller and released with the matching *_free function.
 */
#ifndef DTLAB_DTLAB_H
#define DTLAB_DTLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DTLAB_API __declspec(dllexport)
#else
#define DTLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dtl_status {
  DTL_OK = 0,
  DTL_E_INVALID_ARGUMENT = -1,
  DTL_E_DOMAIN = -2,
  DTL_E_INCONSISTENT_RANGE = -3,
  DTL_E_CLASSIFICATION = -4,
  DTL_E_NORMALIZATION = -5,
  DTL_E_QUADRATURE = -6,
  DTL_E_ASYMMETRIC_INPUT = -7,
  DTL_E_ELLIPTICITY = -8,
  DTL_E_RANGE = -9,
  DTL_E_CONVERGENCE = -10,
  DTL_E_INVALID_BOUND = -11,
  DTL_E_EXTENSION = -12,
  DTL_E_DEGENERATE_COEFFICIENTS = -13,
  DTL_E_MONOTONICITY = -14,
  DTL_E_RANGE_VIOLATION = -15,
  DTL_E_COMPATIBILITY = -16,
  DTL_E_INTERIOR_POINT = -17,
  DTL_E_EDGE_CASE_UNSUPPORTED = -18,
  DTL_E_WINDOW = -19,
  DTL_E_INSUFFICIENT_TRAJECTORIES = -20,
  DTL_E_MISMATCHED_SAMPLING = -21,
  DTL_E_SAMPLER = -22,
  DTL_E_CONFIG = -23,
  DTL_E_IO = -24,
  DTL_E_UNKNOWN = -100
} dtl_status;

/* Library version string, e.g. "0.1.0". Static storage; do not free. */
DTLAB_API const char* dtl_version(void);

/* Message for the most recent failure on this thread (empty if none).
 * Static thread-local storage; do not free. */
DTLAB_API const char* dtl_last_error(void);

/* Releases a string returned through a char** out-parameter. */
DTLAB_API void dtl_string_free(char* s);

/* Number of worker threads for data-parallel loops (1 = serial). */
DTLAB_API dtl_status dtl_set_worker_count(int n);

/* ----------------------------------------------------------------- laws */

typedef struct dtl_law dtl_law;

/* P(s) = c s (normalized shape s; the constant c scales the flux matrix).
 * full_line != 0 admits every real state. */
DTLAB_API dtl_status dtl_law_ideal(double c, int full_line, dtl_law** out);
/* P(s) = c s^gamma on [0, inf). */
DTLAB_API dtl_status dtl_law_isentropic(double gamma, double c, dtl_law** out);
/* P(s) = (1/kappa) ln s on (0, inf). */
DTLAB_API dtl_status dtl_law_slightly_compressible(double kappa, dtl_law** out);

/* Normalized pressure shape and its derivative at state s. */
DTLAB_API dtl_status dtl_law_pressure(const dtl_law* law, double s, double* out);
DTLAB_API dtl_status dtl_law_pressure_prime(const dtl_law* law, double s, double* out);
/* Admissible state interval; lo_open/hi_open flag open ends. */
DTLAB_API dtl_status dtl_law_domain(const dtl_law* law, double* lo, double* hi, int* lo_open,
                                    int* hi_open);
DTLAB_API void dtl_law_free(dtl_law* law);

/* ----------------------------------------------------- substitutions */

typedef struct dtl_transform dtl_transform;

/* Increasing substitution F(s) = integral of e^{lambda P(sigma)} dsigma.
 * The law handle may be freed afterwards; the transform keeps its own
 * reference. */
DTLAB_API dtl_status dtl_transform_make(const dtl_law* law, double lambda, dtl_transform** out);
DTLAB_API dtl_status dtl_transform_f(const dtl_transform* t, double s, double* out);
DTLAB_API dtl_status dtl_transform_f_inv(const dtl_transform* t, double w, double* out);
DTLAB_API dtl_status dtl_transform_fprime(const dtl_transform* t, double s, double* out);
DTLAB_API void dtl_transform_free(dtl_transform* t);

/* Slope thresholds from the ellipticity constant c0 and the flux-form
 * bounds c1 (negative part) and c2 (positive part); strict != 0 nudges
 * zero thresholds to +-eps_lambda. */
DTLAB_API dtl_status dtl_lambda_thresholds(double c0, double c1, double c2, int strict,
                                           double eps_lambda, double* lambda1, double* lambda2);

/* ----------------------------------------------------------- kernels */

typedef struct dtl_kernel dtl_kernel;

/* Gaussian displacement kernel: mean mu[dim], covariance sigma[dim*dim]
 * (row-major), waiting time tau, truncation radius in standard
 * deviations. */
DTLAB_API dtl_status dtl_kernel_gaussian(int dim, const double* mu, const double* sigma,
                                         double tau, double trunc_sigmas, dtl_kernel** out);

/* Displacement moments at departure point x[dim] and time t:
 *   mean[dim]        first moment of the displacement,
 *   second[dim*dim]  second moment (row-major),
 *   diffusion[dim*dim] = second / (2 tau),
 *   drift[dim]       = mean / tau.
 * Any output pointer may be NULL. */
DTLAB_API dtl_status dtl_kernel_moments(const dtl_kernel* k, const double* x, double t, int order,
                                        double* mean, double* second, double* diffusion,
                                        double* drift);
DTLAB_API void dtl_kernel_free(dtl_kernel* k);

/* --------------------------------------------------------- scenarios */

typedef struct dtl_result dtl_result;

/* Runs a built-in preset or a configuration file. out_dir may be NULL
 * (no files written); seed may be NULL (use the configured seed).
 * Returns DTL_OK even when verification checks fail — inspect
 * dtl_result_passed. */
DTLAB_API dtl_status dtl_run_preset(const char* name, const char* out_dir, const uint64_t* seed,
                                    dtl_result** out);
DTLAB_API dtl_status dtl_run_scenario_file(const char* path, const char* out_dir,
                                           const uint64_t* seed, dtl_result** out);

DTLAB_API dtl_status dtl_result_name(const dtl_result* r, const char** out);
DTLAB_API dtl_status dtl_result_passed(const dtl_result* r, int* out);
/* Full human-readable report: constants block plus every check line. */
DTLAB_API dtl_status dtl_result_text(const dtl_result* r, const char** out);
/* Scalar metric by key (as listed in the report text); DTL_E_INVALID_ARGUMENT
 * if the key is unknown. */
DTLAB_API dtl_status dtl_result_metric(const dtl_result* r, const char* key, double* out);
DTLAB_API dtl_status dtl_result_file_count(const dtl_result* r, size_t* out);
DTLAB_API dtl_status dtl_result_file_path(const dtl_result* r, size_t index, const char** out);
DTLAB_API void dtl_result_free(dtl_result* r);

/* Newline-terminated table of preset names and descriptions; JSON array
 * when json != 0. Free with dtl_string_free. */
DTLAB_API dtl_status dtl_list_presets(int json, char** out);

#ifdef __cplusplus
}
#endif

#endif /* DTLAB_DTLAB_H */
