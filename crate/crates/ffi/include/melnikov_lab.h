#ifndef MELNIKOV_LAB_H
#define MELNIKOV_LAB_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/*
 Result codes.
 */
typedef enum MlStatus {
  ML_STATUS_OK = 0,
  ML_STATUS_NULL_POINTER = 1,
  /*
   Argument outside its domain or otherwise invalid.
   */
  ML_STATUS_INVALID_ARGUMENT = 2,
  /*
   Malformed perturbation JSON or tables.
   */
  ML_STATUS_INVALID_SPEC = 3,
  /*
   Request outside what the library supports (degree, configuration table).
   */
  ML_STATUS_UNSUPPORTED = 4,
  /*
   A numerical certification did not succeed.
   */
  ML_STATUS_CERTIFICATION_FAILED = 5,
  /*
   Sliding, escape or step exhaustion in the simulator.
   */
  ML_STATUS_SIMULATION_FAILED = 6,
  /*
   A buffer passed by the caller is too small.
   */
  ML_STATUS_BUFFER_TOO_SMALL = 7,
  /*
   Internal error; the library caught a panic.
   */
  ML_STATUS_INTERNAL = 8,
} MlStatus;

/*
 Limit cycles found by the simulator.
 */
typedef struct MlCycles MlCycles;

/*
 Perturbation `R±` of degree `m`.
 */
typedef struct MlSpec MlSpec;

typedef struct MlParams {
  double a;
  double b;
  double c;
  double d;
  double alpha;
  double beta;
  double gamma;
  double kappa;
  double rho;
} MlParams;

typedef struct MlConfiguration {
  size_t m1;
  size_t n1;
  bool certified;
} MlConfiguration;

/*
 `which`: 0 for a zero of `r·M₁`, 1 for a zero of `r·N₁`.
 */
typedef struct MlZeroTarget {
  double location;
  uint32_t which;
} MlZeroTarget;

/*
 `nest`: 0 for the left center `z = -1`, 1 for the right center `z = +1`.
 */
typedef struct MlSimConfig {
  double epsilon;
  double rk_tol;
  double event_tol;
  size_t max_steps;
  uint32_t nest;
  bool allow_large_epsilon;
} MlSimConfig;

/*
 A reported cycle; `predicted_r0` and `deviation` are NaN when no certified zero exists.
 */
typedef struct MlCycleReport {
  double section_point;
  double radius_in_w;
  double predicted_r0;
  double deviation;
  double p_prime;
  bool stable;
  bool hyperbolic;
} MlCycleReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the last failure on this thread; empty after a success.
 */
const char *ml_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *ml_version(void);

/*
 # Safety
 `s` must come from this library or be null.
 */
void ml_string_free(char *s);

/*
 # Safety
 `out` must be a valid pointer.
 */
enum MlStatus ml_spec_zero(size_t m, bool holomorphic, struct MlSpec **out);

/*
 Parses and validates a perturbation in the JSON schema used by the command line.

 # Safety
 `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MlStatus ml_spec_from_json(const char *json, struct MlSpec **out);

/*
 # Safety
 `spec` must be a live handle and `out` a valid pointer.
 */
enum MlStatus ml_spec_to_json(const struct MlSpec *spec, char **out);

/*
 # Safety
 `spec` must come from this library or be null.
 */
void ml_spec_free(struct MlSpec *spec);

/*
 The spec whose `M₁` is the `N₁` of `spec`.

 # Safety
 `spec` must be a live handle and `out` a valid pointer.
 */
enum MlStatus ml_spec_reflect(const struct MlSpec *spec, struct MlSpec **out);

/*
 # Safety
 `spec` must be a live handle and `out` a valid pointer.
 */
enum MlStatus ml_spec_params(const struct MlSpec *spec, struct MlParams *out);

/*
 # Safety
 `params` must be readable and `out` a valid pointer.
 */
enum MlStatus ml_params_to_spec(const struct MlParams *params,
                                size_t m,
                                bool holomorphic,
                                struct MlSpec **out);

/*
 Closed-form `M₁(r)` and `N₁(r)`.

 # Safety
 `spec` must be a live handle; `m1` and `n1` valid pointers.
 */
enum MlStatus ml_eval(const struct MlSpec *spec, double r, double *m1, double *n1);

/*
 Averaged function of one nest by adaptive quadrature (any degree).

 # Safety
 `spec` must be a live handle and `out` a valid pointer.
 */
enum MlStatus ml_quadrature(const struct MlSpec *spec, double r, uint32_t nest, double *out);

/*
 Certified zero counts of `M₁` and `N₁` in `(0,1)`.

 # Safety
 `spec` must be a live handle and `out` a valid pointer.
 */
enum MlStatus ml_verify(const struct MlSpec *spec, struct MlConfiguration *out);

/*
 Zero locations of `M₁` (`which = 0`) or `N₁` (`which = 1`) in `(0,1)`.

 # Safety
 `spec` must be a live handle, `buf` writable for `cap` doubles (or null when `cap` is
 zero), `count` and `certified` valid pointers.
 */
enum MlStatus ml_zeros(const struct MlSpec *spec,
                       uint32_t which,
                       double *buf,
                       size_t cap,
                       size_t *count,
                       bool *certified);

/*
 Solves for the parameters placing zeros at `targets`.

 # Safety
 `targets` must be readable for `n` entries and `out` a valid pointer.
 */
enum MlStatus ml_design(const struct MlZeroTarget *targets,
                        size_t n,
                        size_t m,
                        bool holomorphic,
                        struct MlParams *out);

/*
 A perturbation with certified configuration `[[i,j]]`, reproducible from `seed`.

 # Safety
 `out` must be a valid pointer.
 */
enum MlStatus ml_realize(size_t i,
                         size_t j,
                         size_t m,
                         bool holomorphic,
                         uint64_t seed,
                         struct MlSpec **out);

/*
 Defaults: `ε = 1e-3`, tolerances `1e-10`/`1e-12`, left nest.
 */
struct MlSimConfig ml_sim_config_default(void);

/*
 One return to the section of the configured nest.

 # Safety
 `spec` and `cfg` must be readable and `out` a valid pointer.
 */
enum MlStatus ml_poincare_map(const struct MlSpec *spec,
                              const struct MlSimConfig *cfg,
                              double x0,
                              double *out);

/*
 Fixed points of the return map for `w`-radii in `(r_lo, r_hi)`.

 # Safety
 `spec` and `cfg` must be readable and `out` a valid pointer.
 */
enum MlStatus ml_find_cycles(const struct MlSpec *spec,
                             const struct MlSimConfig *cfg,
                             double r_lo,
                             double r_hi,
                             size_t n_seeds,
                             struct MlCycles **out);

/*
 # Safety
 `cycles` must be a live handle or null.
 */
size_t ml_cycles_len(const struct MlCycles *cycles);

/*
 # Safety
 `cycles` must be a live handle and `out` a valid pointer.
 */
enum MlStatus ml_cycles_get(const struct MlCycles *cycles, size_t index, struct MlCycleReport *out);

/*
 # Safety
 `cycles` must come from this library or be null.
 */
void ml_cycles_free(struct MlCycles *cycles);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MELNIKOV_LAB_H */
