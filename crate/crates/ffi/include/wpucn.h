#ifndef WPUCN_H
#define WPUCN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum WpucnStatus {
  WPUCN_STATUS_OK = 0,
  WPUCN_STATUS_NULL_POINTER = 1,
  WPUCN_STATUS_INVALID_ARGUMENT = 2,
  WPUCN_STATUS_PARSE_ERROR = 3,
  WPUCN_STATUS_VALIDATION_ERROR = 4,
  WPUCN_STATUS_DOMAIN_ERROR = 5,
  WPUCN_STATUS_INFEASIBLE = 6,
  WPUCN_STATUS_IO_ERROR = 7,
  // A Rust panic was caught at the boundary.
  WPUCN_STATUS_INTERNAL = 8,
} WpucnStatus;

// Which power source a downlink loss is computed for.
typedef enum WpucnSource {
  WPUCN_SOURCE_HAP = 0,
  WPUCN_SOURCE_UAV = 1,
} WpucnSource;

typedef enum WpucnApproach {
  WPUCN_APPROACH_TRADITIONAL_PS = 0,
  WPUCN_APPROACH_UAV_WET = 1,
  WPUCN_APPROACH_HYBRID = 2,
} WpucnApproach;

typedef enum WpucnScheme {
  WPUCN_SCHEME_SA = 0,
  WPUCN_SCHEME_AAIS = 1,
  WPUCN_SCHEME_AASS_I = 2,
  WPUCN_SCHEME_AASS_II = 3,
  WPUCN_SCHEME_RAB = 4,
  WPUCN_SCHEME_FULL_CSI = 5,
} WpucnScheme;

// Opaque time-allocation plan.
typedef struct WpucnPlan WpucnPlan;

// Opaque scenario configuration.
typedef struct WpucnScenario WpucnScenario;

// Linear loss factors of one link; `total` is their product for the downlink.
typedef struct WpucnPathLoss {
  double air;
  double refraction;
  double soil;
  double total;
  double uplink;
  double alpha;
  double beta;
} WpucnPathLoss;

typedef struct WpucnPlanSummary {
  double t_p1;
  double t_p2;
  double t_p3;
  double t_p4;
  double t_total;
  // UAV mission energy, J.
  double energy_j;
  double kkt_residual;
  size_t num_uds;
  bool feasible;
} WpucnPlanSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call into this library on the same thread.
const char *wpucn_last_error(void);

// Library version as a static NUL-terminated string.
const char *wpucn_version(void);

// New scenario with every parameter at its default.
struct WpucnScenario *wpucn_scenario_default(void);

// Parses a flat TOML scenario; absent keys take their defaults.
//
// # Safety
// `toml` must be a NUL-terminated string and `out` a valid pointer.
enum WpucnStatus wpucn_scenario_from_toml(const char *toml, struct WpucnScenario **out);

// # Safety
// `scenario` must come from this library and not be used afterwards. Null is ignored.
void wpucn_scenario_free(struct WpucnScenario *scenario);

// Sets a numeric parameter by its configuration key (for example `vwc_mv`).
// Integer keys accept whole numbers. The scenario is left unchanged on error.
//
// # Safety
// `scenario` must be a live handle and `key` a NUL-terminated string.
enum WpucnStatus wpucn_scenario_set(struct WpucnScenario *scenario, const char *key, double value);

// Reads a numeric parameter by its configuration key.
//
// # Safety
// `scenario` must be a live handle, `key` a NUL-terminated string and `out` valid.
enum WpucnStatus wpucn_scenario_get(const struct WpucnScenario *scenario,
                                    const char *key,
                                    double *out);

// Loss factors for a sensor at horizontal position (`x`, `y`) relative to the disk centre.
//
// # Safety
// `scenario` must be a live handle and `out` valid.
enum WpucnStatus wpucn_path_loss(const struct WpucnScenario *scenario,
                                 enum WpucnSource source,
                                 double x,
                                 double y,
                                 struct WpucnPathLoss *out);

// Samples sensor positions and fading with `seed`, then solves the
// energy-minimal time allocation. `hap_scheme` or `uav_scheme` is ignored
// when the approach does not use that source.
//
// # Safety
// `scenario` must be a live handle and `out` valid.
enum WpucnStatus wpucn_plan(const struct WpucnScenario *scenario,
                            enum WpucnApproach approach,
                            enum WpucnScheme hap_scheme,
                            enum WpucnScheme uav_scheme,
                            uint64_t seed,
                            struct WpucnPlan **out);

// # Safety
// `plan` must be a live handle and `out` valid.
enum WpucnStatus wpucn_plan_summary(const struct WpucnPlan *plan, struct WpucnPlanSummary *out);

// Copies the per-sensor upload slots into `out`, which must hold `len` values.
// `len` must equal the plan's sensor count.
//
// # Safety
// `plan` must be a live handle and `out` point to `len` writable doubles.
enum WpucnStatus wpucn_plan_slots(const struct WpucnPlan *plan, double *out, size_t len);

// # Safety
// `plan` must come from this library and not be used afterwards. Null is ignored.
void wpucn_plan_free(struct WpucnPlan *plan);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WPUCN_H */
