#ifndef AB_SOLENOID_H
#define AB_SOLENOID_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AbGauge {
  AB_GAUGE_SYMMETRIC = 0,
  AB_GAUGE_LANDAU2 = 1,
} AbGauge;

typedef enum AbRampShape {
  AB_RAMP_SHAPE_SMOOTHSTEP = 0,
  AB_RAMP_SHAPE_LINEAR = 1,
} AbRampShape;

typedef enum AbStatus {
  AB_STATUS_OK = 0,
  AB_STATUS_NULL_POINTER = 1,
  AB_STATUS_INVALID_INPUT = 2,
  AB_STATUS_NEAR_SINGULAR = 3,
  AB_STATUS_NOT_CONVERGED = 4,
  AB_STATUS_NUMERICAL = 5,
  AB_STATUS_PANIC = 6,
} AbStatus;

/**
 * Opaque solenoid handle.
 */
typedef struct AbSolenoid AbSolenoid;

typedef struct AbVec2 {
  double x;
  double y;
} AbVec2;

/**
 * Cylindrical components of the finite-solenoid fields at one point.
 */
typedef struct AbCylindricalField {
  double a_phi;
  double b_r;
  double b_z;
} AbCylindricalField;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Infinite solenoid of radius `radius` and interior field `b0`.
 */
enum AbStatus ab_solenoid_new_infinite(double radius, double b0, struct AbSolenoid **out);

/**
 * Finite solenoid occupying `|z| <= half_length`.
 */
enum AbStatus ab_solenoid_new_finite(double radius,
                                     double b0,
                                     double half_length,
                                     struct AbSolenoid **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `h` must be null or a handle not yet freed.
 */
void ab_solenoid_free(struct AbSolenoid *h);

enum AbStatus ab_solenoid_flux(const struct AbSolenoid *h, double *out);

/**
 * Vector potential of an infinite solenoid at `(x, y)`.
 */
enum AbStatus ab_potential(const struct AbSolenoid *h,
                           enum AbGauge gauge,
                           double x,
                           double y,
                           struct AbVec2 *out);

/**
 * Fields of a finite solenoid at cylindrical `(r, z)`.
 */
enum AbStatus ab_finite_field(const struct AbSolenoid *h,
                              double r,
                              double z,
                              double tol,
                              struct AbCylindricalField *out);

/**
 * `e ∮ A · dx` over a circle traversed `winding` times counterclockwise.
 */
enum AbStatus ab_phase_circle(const struct AbSolenoid *h,
                              enum AbGauge gauge,
                              double cx,
                              double cy,
                              double radius,
                              uint32_t winding,
                              double e,
                              double tol,
                              double *out);

enum AbStatus ab_bessel_j(double nu, double x, double tol, double *out);

/**
 * Exponent of the radial wave function near a finite solenoid.
 */
enum AbStatus ab_alpha_exponent(const struct AbSolenoid *h,
                                int64_t m,
                                double r,
                                double z,
                                double e,
                                double tol,
                                double *out);

/**
 * Change of mechanical angular momentum of a charge held at `r_e` while the
 * interior field ramps from 0 to the handle's `b0` over `t_f`.
 */
enum AbStatus ab_ramp_delta_l_mech(const struct AbSolenoid *h,
                                   double r_e,
                                   enum AbRampShape shape,
                                   double t_f,
                                   double e,
                                   double *out);

/**
 * Copies the calling thread's last error message, NUL-terminated and
 * truncated to `len` bytes, into `buf`. Returns the untruncated length plus
 * one, so a zero-length call can size the buffer.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t ab_last_error_message(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AB_SOLENOID_H */
