#ifndef RCATENOID_H
#define RCATENOID_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RcStatus {
  RC_STATUS_OK = 0,
  RC_STATUS_NULL_POINTER = 1,
  RC_STATUS_DOMAIN = 2,
  RC_STATUS_CYLINDER_REGIME = 3,
  RC_STATUS_NOT_APPLICABLE = 4,
  RC_STATUS_OUT_OF_RANGE = 5,
  RC_STATUS_QUADRATURE_NON_CONVERGENCE = 6,
  RC_STATUS_NO_BRACKET = 7,
  RC_STATUS_ITERATION_LIMIT = 8,
  RC_STATUS_HEIGHT_NOT_REACHED = 9,
  RC_STATUS_UNVALIDATED_REGIME = 10,
  RC_STATUS_STEP_UNDERFLOW = 11,
  RC_STATUS_STEP_LIMIT = 12,
  RC_STATUS_IO = 13,
  RC_STATUS_PARSE = 14,
  RC_STATUS_BUFFER_TOO_SMALL = 15,
  RC_STATUS_INDEX_OUT_OF_RANGE = 16,
  RC_STATUS_PANIC = 17,
} RcStatus;

typedef enum RcRegime {
  RC_REGIME_CYLINDER = 0,
  RC_REGIME_Q_BELOW_ONE = 1,
  RC_REGIME_Q_AT_LEAST_ONE = 2,
} RcRegime;

// Rotational family `(n, r)` with its numerical settings.
typedef struct RcFamily RcFamily;

// Upper half of a sampled profile curve.
typedef struct RcProfile RcProfile;

typedef struct RcValue {
  double value;
  double error_estimate;
} RcValue;

typedef struct RcEnvelopePoint {
  double t;
  double m;
  double a_star;
  bool validated;
} RcEnvelopePoint;

// Roots beyond the second are counted but not stored; absent roots are NaN.
typedef struct RcBvpResult {
  size_t count;
  double root_lo;
  double root_hi;
  double m0;
  double a0;
  bool validated;
} RcBvpResult;

typedef struct RcCrossing {
  double rho;
  double t;
  double residual;
} RcCrossing;

typedef struct RcProfilePoint {
  double t;
  double f;
  double f_t;
  double f_tt;
} RcProfilePoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *rc_version(void);

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len - 1` bytes) and returns the full message length.
size_t rc_last_error(char *buf, size_t len);

// Creates the family `(n, r)` with default tolerances.
enum RcStatus rc_family_new(int64_t n, int64_t r, struct RcFamily **out);

void rc_family_free(struct RcFamily *fam);

// Replaces the quadrature and ODE tolerances; the handle is unchanged on error.
enum RcStatus rc_family_set_tolerances(struct RcFamily *fam,
                                       double quad_rel_tol,
                                       double quad_abs_tol,
                                       double ode_rel_tol,
                                       double ode_abs_tol);

enum RcStatus rc_family_q(const struct RcFamily *fam, double *out);

enum RcStatus rc_family_regime(const struct RcFamily *fam, enum RcRegime *out);

// Half-height `L(a)`.
enum RcStatus rc_half_height(const struct RcFamily *fam, double a, struct RcValue *out);

// `dL/da`.
enum RcStatus rc_half_height_derivative(const struct RcFamily *fam, double a, struct RcValue *out);

// Height `λ(a, ρ)` at which the catenoid with neck `a` reaches radius `ρ`.
enum RcStatus rc_lambda(const struct RcFamily *fam, double a, double rho, struct RcValue *out);

// Limit of `L(a)` as `a` grows.
enum RcStatus rc_height_limit(const struct RcFamily *fam, double *out);

// Radius `φ^{t0}(a)` of the catenoid with neck `a` at height `t0`.
enum RcStatus rc_phi(const struct RcFamily *fam, double t0, double a, double *out);

// Neck whose half-height equals `t0`.
enum RcStatus rc_alpha(const struct RcFamily *fam, double t0, double *out);

// Neck threshold `M`, for `0 < q < 1` only.
enum RcStatus rc_neck_threshold(const struct RcFamily *fam, double *out);

// Height threshold `T`; for `q >= 1` it is the height limit.
enum RcStatus rc_height_threshold(const struct RcFamily *fam, double *out);

// Minimal radius `m(t0)` over the family and its minimiser.
enum RcStatus rc_envelope_min(const struct RcFamily *fam, double t0, struct RcEnvelopePoint *out);

// Catenoids through the circles of radius `radius` at heights `±t0`.
// Outside the validated range this fails with `UnvalidatedRegime` unless
// `allow_unvalidated` is set, in which case a grid scan answers.
enum RcStatus rc_count_bvp(const struct RcFamily *fam,
                           double t0,
                           double radius,
                           bool allow_unvalidated,
                           struct RcBvpResult *out);

// Crossings in `t > 0` of the profiles with necks `a` and `b`. Writes up to
// `cap` crossings and stores the total number in `count`; fails with
// `BufferTooSmall` (after filling the buffer) when `cap` is short.
enum RcStatus rc_intersections(const struct RcFamily *fam,
                               double a,
                               double b,
                               struct RcCrossing *buf,
                               size_t cap,
                               size_t *count);

// Samples the upper half of the profile with neck `a` at `n_t + 1` points.
enum RcStatus rc_profile_sample(const struct RcFamily *fam,
                                double a,
                                size_t n_t,
                                struct RcProfile **out);

void rc_profile_free(struct RcProfile *profile);

enum RcStatus rc_profile_len(const struct RcProfile *profile, size_t *out);

enum RcStatus rc_profile_point(const struct RcProfile *profile,
                               size_t index,
                               struct RcProfilePoint *out);

// Mean curvatures `H_1 … H_n` at a profile point; `buf` must hold `n` values.
enum RcStatus rc_mean_curvatures(const struct RcFamily *fam,
                                 struct RcProfilePoint point,
                                 double *buf,
                                 size_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RCATENOID_H */
