/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef CONSENSUS_LAB_H
#define CONSENSUS_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes of every fallible call.
 */
typedef enum ClStatus {
  CL_STATUS_OK = 0,
  CL_STATUS_NULL_POINTER = 1,
  CL_STATUS_INVALID_UTF8 = 2,
  /*
   Malformed JSON or a field of the wrong type.
   */
  CL_STATUS_PARSE = 3,
  /*
   Well-formed input that violates a model invariant.
   */
  CL_STATUS_VALIDATION = 4,
  /*
   Singular or indefinite graph matrices.
   */
  CL_STATUS_NUMERICAL = 5,
  /*
   The simulation stopped early; the partial trace is still returned.
   */
  CL_STATUS_ABORTED = 6,
  CL_STATUS_IO = 7,
  CL_STATUS_OUT_OF_RANGE = 8,
  CL_STATUS_PANIC = 9,
} ClStatus;

/*
 A validated scenario.
 */
typedef struct ClScenario ClScenario;

/*
 A simulation trace.
 */
typedef struct ClTrace ClTrace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread, or an empty string. The
 pointer stays valid until the next failing call on the same thread.
 */
const char *cl_last_error(void);

/*
 Library version, a static NUL-terminated string.
 */
const char *cl_version(void);

/*
 Parses and validates a scenario from JSON text.

 # Safety
 `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ClStatus cl_scenario_from_json(const char *json, struct ClScenario **out);

/*
 Loads and validates a scenario file.

 # Safety
 `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ClStatus cl_scenario_from_file(const char *path, struct ClScenario **out);

/*
 Loads a bundled scenario: `"sec5"`, `"avoidance_pair"` or `"obstacle"`.

 # Safety
 `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ClStatus cl_scenario_builtin(const char *name, struct ClScenario **out);

/*
 # Safety
 `scenario` must be NULL or a handle from a `cl_scenario_*` constructor
 that has not been freed.
 */
void cl_scenario_free(struct ClScenario *scenario);

/*
 # Safety
 `scenario` must be a live handle and `out` a valid pointer.
 */
enum ClStatus cl_scenario_n_agents(const struct ClScenario *scenario, size_t *out);

/*
 # Safety
 `scenario` must be a live handle and `out` a valid pointer.
 */
enum ClStatus cl_scenario_order(const struct ClScenario *scenario, size_t *out);

/*
 Replaces the simulated horizon; the scenario is revalidated.

 # Safety
 `scenario` must be a live handle.
 */
enum ClStatus cl_scenario_set_duration(struct ClScenario *scenario, double duration);

/*
 Replaces the integration step; the scenario is revalidated.

 # Safety
 `scenario` must be a live handle.
 */
enum ClStatus cl_scenario_set_dt(struct ClScenario *scenario, double dt);

/*
 Runs the closed loop. On `CL_STATUS_ABORTED` the partial trace is still
 written to `out` and must be freed.

 # Safety
 `scenario` must be a live handle and `out` a valid pointer.
 */
enum ClStatus cl_run(const struct ClScenario *scenario, struct ClTrace **out);

/*
 # Safety
 `trace` must be NULL or a handle from [`cl_run`] that has not been freed.
 */
void cl_trace_free(struct ClTrace *trace);

/*
 Number of records.

 # Safety
 `trace` must be a live handle and `out` a valid pointer.
 */
enum ClStatus cl_trace_len(const struct ClTrace *trace, size_t *out);

/*
 Writes 1 to `out` if the run stopped early, else 0.

 # Safety
 `trace` must be a live handle and `out` a valid pointer.
 */
enum ClStatus cl_trace_aborted(const struct ClTrace *trace, int *out);

/*
 Time of record `index`.

 # Safety
 `trace` must be a live handle and `out` a valid pointer.
 */
enum ClStatus cl_trace_time(const struct ClTrace *trace, size_t index, double *out);

/*
 State channel `channel` (0-based) of follower `agent` (0-based) at record
 `index`.

 # Safety
 `trace` must be a live handle and `out` a valid pointer.
 */
enum ClStatus cl_trace_agent_state(const struct ClTrace *trace,
                                   size_t index,
                                   size_t agent,
                                   size_t channel,
                                   double *out);

/*
 State channel `channel` of the leader at record `index`.

 # Safety
 `trace` must be a live handle and `out` a valid pointer.
 */
enum ClStatus cl_trace_leader_state(const struct ClTrace *trace,
                                    size_t index,
                                    size_t channel,
                                    double *out);

/*
 Tracking error `(x_i - ψ_i) - (x_0 - ψ_0)` in channel `channel`.

 # Safety
 `trace` must be a live handle and `out` a valid pointer.
 */
enum ClStatus cl_trace_tracking_error(const struct ClTrace *trace,
                                      size_t index,
                                      size_t agent,
                                      size_t channel,
                                      double *out);

/*
 Control input of follower `agent` at record `index`.

 # Safety
 `trace` must be a live handle and `out` a valid pointer.
 */
enum ClStatus cl_trace_control(const struct ClTrace *trace,
                               size_t index,
                               size_t agent,
                               double *out);

/*
 Writes `trace.csv`, `summary.json` and the figure tables into `dir`.

 # Safety
 `trace` must be a live handle and `dir` a NUL-terminated string.
 */
enum ClStatus cl_trace_write_outputs(const struct ClTrace *trace, const char *dir);

/*
 Metrics summary as a JSON string, released with [`cl_string_free`].

 # Safety
 `trace` must be a live handle and `out` a valid pointer.
 */
enum ClStatus cl_trace_metrics_json(const struct ClTrace *trace, char **out);

/*
 # Safety
 `s` must be NULL or a string returned by this library.
 */
void cl_string_free(char *s);

/*
 Solves the graph Lyapunov construction for an `n`-follower topology.
 `adjacency` is row-major `n×n`; `q_out` receives `n` values of
 `q = (ν1 L + ν2 B)^{-1} 1`.

 # Safety
 `adjacency` must hold `n*n` doubles, `leader_weights` and `q_out` `n`
 doubles each, and `min_eig_q_out` must be valid.
 */
enum ClStatus cl_graph_lyapunov(size_t n,
                                const double *adjacency,
                                const double *leader_weights,
                                double nu1,
                                double nu2,
                                double *q_out,
                                double *min_eig_q_out);

/*
 Writes 1 to `out` if `s^m + λ_m s^{m-1} + ... + λ_1` (`m = len`) is
 Hurwitz, else 0.

 # Safety
 `lambda` must hold `len` doubles and `out` must be valid.
 */
enum ClStatus cl_check_hurwitz(const double *lambda, size_t len, int *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONSENSUS_LAB_H */
