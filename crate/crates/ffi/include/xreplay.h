#ifndef XREPLAY_H
#define XREPLAY_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result codes.
typedef enum XrStatus {
  XR_STATUS_OK = 0,
  XR_STATUS_NULL_POINTER = 1,
  XR_STATUS_INVALID_ARGUMENT = 2,
  XR_STATUS_CONFIG = 3,
  XR_STATUS_SHAPE = 4,
  XR_STATUS_NOT_READY = 5,
  XR_STATUS_DOMAIN = 6,
  XR_STATUS_BOUNDS = 7,
  XR_STATUS_NUMERICAL = 8,
  XR_STATUS_INTEGRITY = 9,
  XR_STATUS_UNSUPPORTED_GOAL = 10,
  XR_STATUS_IO = 11,
  XR_STATUS_PARSE = 12,
  XR_STATUS_PANIC = 13,
} XrStatus;

// An environment instance with its own seeded reset stream.
typedef struct XrEnv XrEnv;

// Replay buffer with optional prioritized sampling and combined replay.
typedef struct XrReplay XrReplay;

// Sum tree over non-negative leaf values.
typedef struct XrSumTree XrSumTree;

// Prioritized-replay settings; pass null to [`xr_replay_new`] for uniform
// sampling.
typedef struct XrPerConfig {
  double alpha;
  double beta;
  double epsilon;
  double max_priority_init;
} XrPerConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null if none. The
// pointer stays valid until the next failing call on the same thread.
const char *xr_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *xr_version(void);

// # Safety
// `out` must be a valid pointer.
enum XrStatus xr_sumtree_new(size_t capacity, struct XrSumTree **out);

// # Safety
// `tree` must come from [`xr_sumtree_new`] and not be used afterwards.
void xr_sumtree_free(struct XrSumTree *tree);

// # Safety
// `tree` must be a live handle.
enum XrStatus xr_sumtree_set(struct XrSumTree *tree, size_t index, double value);

// # Safety
// `tree` must be a live handle and `out` valid.
enum XrStatus xr_sumtree_get(struct XrSumTree *tree, size_t index, double *out);

// # Safety
// `tree` must be a live handle and `out` valid.
enum XrStatus xr_sumtree_total(struct XrSumTree *tree, double *out);

// Leaf whose cumulative mass interval contains `u`, for `u` in
// `[0, total)`.
//
// # Safety
// `tree` must be a live handle and `out` valid.
enum XrStatus xr_sumtree_sample(struct XrSumTree *tree, double u, size_t *out);

// `name` is `cartpole`, `mountaincar` or `pendulum`.
//
// # Safety
// `name` must be a NUL-terminated string and `out` valid.
enum XrStatus xr_env_new(const char *name, uint64_t seed, struct XrEnv **out);

// # Safety
// `env` must come from [`xr_env_new`] and not be used afterwards.
void xr_env_free(struct XrEnv *env);

// Observation length, and the number of discrete actions or the action
// vector length for continuous control.
//
// # Safety
// `env` must be a live handle; outputs must be valid.
enum XrStatus xr_env_dims(struct XrEnv *env, size_t *obs_dim, size_t *action_dim, bool *discrete);

// # Safety
// `env` must be a live handle; `obs` must hold `obs_len` doubles.
enum XrStatus xr_env_reset(struct XrEnv *env, double *obs, size_t obs_len);

// # Safety
// `env` must be a live handle; `obs` holds `obs_len` doubles; the other
// outputs must be valid.
enum XrStatus xr_env_step_discrete(struct XrEnv *env,
                                   size_t action,
                                   double *obs,
                                   size_t obs_len,
                                   double *reward,
                                   bool *done,
                                   bool *truncated);

// # Safety
// As [`xr_env_step_discrete`]; `action` holds `action_len` doubles.
enum XrStatus xr_env_step_continuous(struct XrEnv *env,
                                     const double *action,
                                     size_t action_len,
                                     double *obs,
                                     size_t obs_len,
                                     double *reward,
                                     bool *done,
                                     bool *truncated);

// Default prioritized-replay settings.
struct XrPerConfig xr_per_config_default(void);

// # Safety
// `per` is null or valid; `out` must be valid.
enum XrStatus xr_replay_new(size_t capacity,
                            bool combined,
                            const struct XrPerConfig *per,
                            uint64_t seed,
                            struct XrReplay **out);

// # Safety
// `replay` must come from [`xr_replay_new`] and not be used afterwards.
void xr_replay_free(struct XrReplay *replay);

// # Safety
// `replay` must be a live handle and `out` valid.
enum XrStatus xr_replay_len(struct XrReplay *replay, size_t *out);

// Stores a transition with a discrete action. `index` (may be null)
// receives its slot.
//
// # Safety
// `state` and `next_state` hold `state_dim` doubles each.
enum XrStatus xr_replay_push_discrete(struct XrReplay *replay,
                                      const double *state,
                                      const double *next_state,
                                      size_t state_dim,
                                      size_t action,
                                      double reward,
                                      bool done,
                                      size_t *index);

// Stores a transition with a continuous action.
//
// # Safety
// As [`xr_replay_push_discrete`]; `action` holds `action_dim` doubles.
enum XrStatus xr_replay_push_continuous(struct XrReplay *replay,
                                        const double *state,
                                        const double *next_state,
                                        size_t state_dim,
                                        const double *action,
                                        size_t action_dim,
                                        double reward,
                                        bool done,
                                        size_t *index);

// Draws `batch` slots and their importance weights.
//
// # Safety
// `indices` and `weights` hold `batch` elements each.
enum XrStatus xr_replay_sample(struct XrReplay *replay,
                               size_t batch,
                               size_t *indices,
                               double *weights);

// Reads back a stored transition's reward and termination flag, and its
// states when `state`/`next_state` are non-null.
//
// # Safety
// Non-null state buffers hold `state_dim` doubles.
enum XrStatus xr_replay_get(struct XrReplay *replay,
                            size_t index,
                            double *state,
                            double *next_state,
                            size_t state_dim,
                            double *reward,
                            bool *done);

// Refreshes priorities from TD errors; a no-op without prioritized replay.
//
// # Safety
// `indices` and `td_errors` hold `n` elements each.
enum XrStatus xr_replay_update_priorities(struct XrReplay *replay,
                                          const size_t *indices,
                                          const double *td_errors,
                                          size_t n);

// Trains from a `key=value` config file and writes `log.csv`,
// `manifest.txt` and `checkpoint.txt` into `out_dir`. `converged_at`
// (may be null) receives the convergence episode, or -1.
//
// # Safety
// Paths must be NUL-terminated strings.
enum XrStatus xr_train(const char *config_path, const char *out_dir, int64_t *converged_at);

// Mean and standard deviation of `episodes` exploration-free returns of a
// saved policy.
//
// # Safety
// `checkpoint_path` must be a NUL-terminated string; outputs valid.
enum XrStatus xr_eval_checkpoint(const char *checkpoint_path,
                                 size_t episodes,
                                 uint64_t seed,
                                 double *mean,
                                 double *std);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XREPLAY_H */
