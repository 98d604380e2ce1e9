#ifndef POROELASTIC_H
#define POROELASTIC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PeBoundary {
  PE_BOUNDARY_A2 = 2,
  PE_BOUNDARY_A3 = 3,
} PeBoundary;

typedef enum PeRegime {
  PE_REGIME_EXPONENTIAL = 0,
  PE_REGIME_NON_EXP_CASE1 = 1,
  PE_REGIME_NON_EXP_CASE2 = 2,
  PE_REGIME_NON_EXP_CASE3 = 3,
} PeRegime;

typedef enum PeStatus {
  PE_STATUS_OK = 0,
  PE_STATUS_NULL_POINTER = 1,
  PE_STATUS_INVALID_ARGUMENT = 2,
  PE_STATUS_PARSE_ERROR = 3,
  PE_STATUS_VALIDATION_FAILED = 4,
  PE_STATUS_NUMERICAL_FAILURE = 5,
  PE_STATUS_PANIC = 6,
} PeStatus;

typedef enum PeVerdict {
  PE_VERDICT_UNIFORMLY_NEGATIVE = 0,
  PE_VERDICT_APPROACHING_AXIS = 1,
  PE_VERDICT_INDETERMINATE = 2,
} PeVerdict;

/**
 * Material parameters with a boundary condition.
 */
typedef struct PeParams PeParams;

/**
 * Result of a resolvent probe.
 */
typedef struct PeProbe PeProbe;

/**
 * Result of a spectral-abscissa scan.
 */
typedef struct PeScan PeScan;

typedef struct PeStability {
  enum PeRegime regime;
  double chi0;
  double chi1;
} PeStability;

typedef struct PeScanRecord {
  size_t n;
  double k;
  double abscissa;
  double abscissa_freq;
} PeScanRecord;

typedef struct PeDecayFit {
  double t0;
  double t1;
  double xi;
  double amplitude;
  double r_squared;
} PeDecayFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread; empty after success.
 * The pointer stays valid until the next `pe_` call on the same thread.
 */
const char *pe_last_error(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *pe_version(void);

/**
 * Creates parameters from a catalog name (`p_exp`, `p_case1`, `p_case2`, `p_case3`) under A3.
 *
 * # Safety
 * `name` must be a nul-terminated string and `out` a valid pointer.
 */
enum PeStatus pe_params_catalog(const char *name, struct PeParams **out);

/**
 * Creates parameters from configuration text.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` a valid pointer.
 */
enum PeStatus pe_params_from_config(const char *text, struct PeParams **out);

/**
 * Releases parameters; null is ignored.
 *
 * # Safety
 * `p` must come from a `pe_params_*` constructor and not be used afterwards.
 */
void pe_params_free(struct PeParams *p);

/**
 * Reads a field by name, e.g. `"tau1"`.
 *
 * # Safety
 * Pointers must be valid; `name` nul-terminated.
 */
enum PeStatus pe_params_get(const struct PeParams *p, const char *name, double *out);

/**
 * Sets a field by name.
 *
 * # Safety
 * Pointers must be valid; `name` nul-terminated.
 */
enum PeStatus pe_params_set(struct PeParams *p, const char *name, double value);

/**
 * # Safety
 * `p` must be a valid handle.
 */
enum PeStatus pe_params_set_boundary(struct PeParams *p, enum PeBoundary bc);

/**
 * Runs every admissibility check; `*ok` is set even when the checks fail.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PeStatus pe_validate(const struct PeParams *p, bool *ok);

/**
 * Stability numbers and regime with relative zero tolerance `tol`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PeStatus pe_classify(const struct PeParams *p, double tol, struct PeStability *out);

/**
 * Eigenvalues of mode `n` into `re[0..6]`, `im[0..6]`.
 *
 * # Safety
 * `re` and `im` must each point to 6 writable doubles.
 */
enum PeStatus pe_mode_spectrum(const struct PeParams *p, size_t n, double *re, double *im);

/**
 * Spectral abscissa of modes `1..=n_max`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PeStatus pe_scan(const struct PeParams *p, size_t n_max, struct PeScan **out);

/**
 * Number of records in a scan; 0 for null.
 *
 * # Safety
 * `s` must be null or a valid handle.
 */
size_t pe_scan_len(const struct PeScan *s);

/**
 * # Safety
 * Pointers must be valid.
 */
enum PeStatus pe_scan_record(const struct PeScan *s, size_t i, struct PeScanRecord *out);

/**
 * Verdict and supremum of a scan.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PeStatus pe_scan_verdict(const struct PeScan *s, enum PeVerdict *verdict, double *sup);

/**
 * # Safety
 * `s` must come from [`pe_scan`] and not be used afterwards.
 */
void pe_scan_free(struct PeScan *s);

/**
 * Resolvent growth probe over the strictly increasing modes `n_list[0..len]`.
 *
 * # Safety
 * `n_list` must point to `len` readable values; other pointers valid.
 */
enum PeStatus pe_probe(const struct PeParams *p,
                       const size_t *n_list,
                       size_t len,
                       double tol,
                       struct PeProbe **out);

/**
 * Fitted growth exponents: tail fit and fit over every point.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PeStatus pe_probe_exponent(const struct PeProbe *r, double *tail, double *full);

/**
 * # Safety
 * `r` must come from [`pe_probe`] and not be used afterwards.
 */
void pe_probe_free(struct PeProbe *r);

/**
 * Evolves broadband initial data with the exact integrator and fits the
 * energy decay over the last `window` fraction of `[0, t_end]`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PeStatus pe_decay_fit(const struct PeParams *p,
                           size_t modes,
                           double dt,
                           double t_end,
                           double window,
                           struct PeDecayFit *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POROELASTIC_H */
