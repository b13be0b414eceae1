/* sgcert - speed-gradient adaptive control simulation and certification.
 *
 * C interface to the shared library. All objects are opaque handles created
 * and destroyed through this API; every fallible call returns a status code
 * and leaves a human-readable message in sg_last_error() (thread-local,
 * valid until the next failing call on the same thread).
 *
 * Handles are not thread-safe individually, but distinct handles may be
 * used from different threads concurrently.
 */
#ifndef SGCERT_H
#define SGCERT_H

#include <stddef.h>

#ifdef _WIN32
#define SGCERT_API __declspec(dllexport)
#else
#define SGCERT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sg_status {
  SG_OK = 0,
  SG_ERR_INVALID_ARGUMENT = 1,
  SG_ERR_PARSE = 2,
  SG_ERR_VALIDATION = 3,
  SG_ERR_BLOWUP = 4, /* integration hit a non-finite state */
  SG_ERR_IO = 5,
  SG_ERR_INTERNAL = 6
} sg_status;

typedef struct sg_scenario sg_scenario;
typedef struct sg_trajectory sg_trajectory;
typedef struct sg_report sg_report;

SGCERT_API const char* sg_version(void);
SGCERT_API const char* sg_status_name(sg_status status);
SGCERT_API const char* sg_last_error(void);

/* --- scenarios ---------------------------------------------------------- */

SGCERT_API sg_status sg_scenario_load(const char* path, sg_scenario** out);
SGCERT_API sg_status sg_scenario_parse(const char* text, const char* name,
                                       sg_scenario** out);
SGCERT_API sg_status sg_scenario_clone(const sg_scenario* scenario,
                                       sg_scenario** out);
SGCERT_API void sg_scenario_free(sg_scenario* scenario);

SGCERT_API const char* sg_scenario_name(const sg_scenario* scenario);
SGCERT_API int sg_scenario_state_dim(const sg_scenario* scenario);
SGCERT_API int sg_scenario_param_dim(const sg_scenario* scenario);
SGCERT_API const char* sg_scenario_law_family(const sg_scenario* scenario);

/* Re-serializes the (possibly overridden) scenario in canonical form. The
 * returned string lives until the scenario is freed or re-serialized. */
SGCERT_API const char* sg_scenario_text(sg_scenario* scenario);

/* Sweepable parameters: kappa, alpha, delta_f, gamma_scale, delta, epsilon,
 * seed. The scenario is revalidated on the next run. */
SGCERT_API sg_status sg_scenario_override(sg_scenario* scenario,
                                          const char* param, double value);
SGCERT_API sg_status sg_scenario_set_tail_fraction(sg_scenario* scenario,
                                                   double tail_fraction);

/* Structural validation without running anything. */
SGCERT_API sg_status sg_scenario_validate(const sg_scenario* scenario);

/* --- simulation and certification --------------------------------------- */

/* Integrates the closed loop and assembles the bound report. Either output
 * may be NULL. On SG_ERR_BLOWUP the blow-up time is in sg_last_error(). */
SGCERT_API sg_status sg_run(const sg_scenario* scenario,
                            sg_trajectory** traj_out, sg_report** report_out);

SGCERT_API void sg_trajectory_free(sg_trajectory* traj);
SGCERT_API size_t sg_trajectory_rows(const sg_trajectory* traj);
SGCERT_API size_t sg_trajectory_cols(const sg_trajectory* traj);
/* Cell (row, col) in the CSV column order t,x1..xn,theta1..thetam,Q,w[,V]. */
SGCERT_API double sg_trajectory_cell(const sg_trajectory* traj, size_t row,
                                     size_t col);
SGCERT_API sg_status sg_trajectory_write_csv(const sg_trajectory* traj,
                                             const char* path);

SGCERT_API void sg_report_free(sg_report* report);
SGCERT_API double sg_report_delta_star(const sg_report* report);
SGCERT_API double sg_report_k0(const sg_report* report);
SGCERT_API double sg_report_corollary_bound(const sg_report* report);
SGCERT_API double sg_report_error_bound_x(const sg_report* report);
SGCERT_API double sg_report_tail_sup_q(const sg_report* report);
SGCERT_API double sg_report_tail_sup_x_norm(const sg_report* report);

SGCERT_API int sg_report_condition_count(const sg_report* report);
SGCERT_API sg_status sg_report_condition(const sg_report* report, int index,
                                         const char** name, int* passed,
                                         int* warning_only, double* margin);
/* strict != 0 counts warning-level conditions as hard failures. */
SGCERT_API int sg_report_conditions_passed(const sg_report* report, int strict);
SGCERT_API int sg_report_conditions_total(const sg_report* report, int strict);
SGCERT_API int sg_report_all_passed(const sg_report* report, int strict);
SGCERT_API sg_status sg_report_write_text(const sg_report* report,
                                          const char* path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SGCERT_H */
