/* pcbench C API.
 *
 * Every function returning pcb_status sets a thread-local message retrievable
 * with pcb_last_error() on failure. Strings returned through char** are owned
 * by the caller and released with pcb_string_free(). Handles are opaque and
 * released with their matching *_free function (NULL is accepted).
 */
#ifndef PCBENCH_PCBENCH_H
#define PCBENCH_PCBENCH_H

#include <stddef.h>
#include <stdint.h>

#if defined(PCBENCH_BUILDING_LIBRARY)
#define PCB_API __attribute__((visibility("default")))
#else
#define PCB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pcb_status {
  PCB_OK = 0,
  PCB_ERR_CONFIG = 1,
  PCB_ERR_ARGUMENT = 2,
  PCB_ERR_RANGE = 3,
  PCB_ERR_EPISODE_COMPLETE = 4,
  PCB_ERR_INTEGRATION = 5,
  PCB_ERR_UNDEFINED_OUTPUT = 6,
  PCB_ERR_PROTOCOL = 7,
  PCB_ERR_TIMEOUT = 8,
  PCB_ERR_HOOK = 9,
  PCB_ERR_SOLVER = 10,
  PCB_ERR_IO = 11,
  PCB_ERR_INTERNAL = 12
} pcb_status;

PCB_API const char* pcb_version(void);
PCB_API const char* pcb_status_name(pcb_status status);
/* Message of the last failed call on this thread; "" if none. */
PCB_API const char* pcb_last_error(void);
PCB_API void pcb_string_free(char* s);

/* JSON array of model descriptors (names, labels, parameters with units). */
PCB_API pcb_status pcb_models_json(char** out);
/* Directory holding the bundled models/ and scenarios/ data. */
PCB_API pcb_status pcb_data_dir(char** out);
/* JSON {"models": [...], "scenarios": [...]} for the scenario files in dir (NULL = bundled). */
PCB_API pcb_status pcb_list_json(const char* scenario_dir, char** out);

/* Scenarios */
typedef struct pcb_scenario pcb_scenario;
PCB_API pcb_status pcb_scenario_load(const char* path, pcb_scenario** out);
PCB_API pcb_status pcb_scenario_from_json(const char* json_text, pcb_scenario** out);
PCB_API pcb_status pcb_scenario_info_json(const pcb_scenario* scenario, char** out);
PCB_API void pcb_scenario_free(pcb_scenario* scenario);

/* Environments */
typedef struct pcb_env pcb_env;

typedef struct pcb_env_dims {
  size_t obs_dim;
  size_t act_dim;
  size_t state_dim;
  size_t measured_dim; /* states followed by model outputs */
  size_t constraint_count;
  size_t steps;
} pcb_env_dims;

typedef struct pcb_step_info {
  double reward;
  size_t step; /* steps taken so far */
  int truncated;
  int terminated; /* always 0 */
  int any_violation;
} pcb_step_info;

typedef struct pcb_reward_context {
  size_t step;
  const double* raw_measured;
  const double* normalized_measured;
  size_t n_measured;
  const double* tracked;
  const double* setpoint;
  size_t n_tracked;
  const double* action;
  const double* previous_action;
  size_t n_u;
  const double* constraint_g;
  size_t n_g;
} pcb_reward_context;

typedef double (*pcb_reward_fn)(const pcb_reward_context* ctx, void* user_data);

PCB_API pcb_status pcb_env_create(const pcb_scenario* scenario, pcb_env** out);
PCB_API pcb_status pcb_env_dims_get(const pcb_env* env, pcb_env_dims* out);
/* obs receives obs_dim values; seed < 0 continues the previous seed's stream. */
PCB_API pcb_status pcb_env_reset(pcb_env* env, int64_t seed, double* obs);
/* action has act_dim values; obs receives obs_dim values; raw_state (state_dim) and
 * constraint_g (constraint_count) may be NULL. */
PCB_API pcb_status pcb_env_step(pcb_env* env, const double* action, double* obs, double* raw_state,
                                double* constraint_g, pcb_step_info* info);
/* Replaces the reward with a user function. Takes effect at the next reset. */
PCB_API pcb_status pcb_env_set_custom_reward(pcb_env* env, pcb_reward_fn fn, void* user_data);
PCB_API void pcb_env_free(pcb_env* env);

/* Rollouts and comparisons, configured by a JSON options document:
 *   {"scenario": path, "policies": [spec...], "reference": spec, "compare": bool,
 *    "episodes": n, "seed": s, "jobs": j, "gamma": g, "normalization": "none"|"per_step"|"minmax",
 *    "timeout_ms": ms, "oracle": {"N", "max_iterations", "tolerance", "multistart"}}
 * Policy specs: "oracle", "random", "constant:v1,v2", "external:<command>", "external:tcp://host:port".
 */
typedef struct pcb_run pcb_run;
PCB_API pcb_status pcb_run_execute(const char* options_json, pcb_run** out);
/* Status of the first failed episode, PCB_OK when every episode completed. */
PCB_API pcb_status pcb_run_episode_status(const pcb_run* run);
PCB_API pcb_status pcb_run_write(const pcb_run* run, const char* out_dir);
PCB_API pcb_status pcb_run_summary_json(const pcb_run* run, char** out);
PCB_API pcb_status pcb_run_table(const pcb_run* run, char** out);
/* 1 when any oracle solve stopped before convergence. */
PCB_API int pcb_run_solver_warning(const pcb_run* run);
PCB_API void pcb_run_free(pcb_run* run);
/* Options document stored in a manifest.json written by pcb_run_write. */
PCB_API pcb_status pcb_manifest_options(const char* manifest_path, char** options_json);

/* Engine-serve mode: the caller's trainer drives the environment over the line protocol. */
PCB_API pcb_status pcb_serve_fd(const pcb_scenario* scenario, int in_fd, int out_fd);
/* Listens on 127.0.0.1:port (0 = any free port) and serves one connection.
 * on_listen, if given, is called with the bound port before accepting. */
PCB_API pcb_status pcb_serve_tcp(const pcb_scenario* scenario, uint16_t port, void (*on_listen)(uint16_t, void*),
                                 void* user_data);

#ifdef __cplusplus
}
#endif

#endif
