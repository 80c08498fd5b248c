#include <stdio.h>
#include <string.h>
#include "xreplay.h"

#define CHECK(call)                                                            \
    do {                                                                       \
        XrStatus s_ = (call);                                                  \
        if (s_ != XR_STATUS_OK) {                                              \
            const char *m_ = xr_last_error_message();                          \
            fprintf(stderr, "%s -> %d: %s\n", #call, (int)s_, m_ ? m_ : "?");  \
            return 1;                                                          \
        }                                                                      \
    } while (0)

int main(void) {
    XrSumTree *tree = NULL;
    CHECK(xr_sumtree_new(4, &tree));
    CHECK(xr_sumtree_set(tree, 0, 3.0));
    CHECK(xr_sumtree_set(tree, 1, 1.0));
    double total = 0.0;
    CHECK(xr_sumtree_total(tree, &total));
    size_t leaf = 99;
    CHECK(xr_sumtree_sample(tree, 3.5, &leaf));
    if (total != 4.0 || leaf != 1) {
        fprintf(stderr, "sum tree: total %f leaf %zu\n", total, leaf);
        return 1;
    }
    if (xr_sumtree_set(tree, 7, 1.0) != XR_STATUS_BOUNDS || xr_last_error_message() == NULL) {
        fprintf(stderr, "expected bounds error\n");
        return 1;
    }
    xr_sumtree_free(tree);

    XrEnv *env = NULL;
    CHECK(xr_env_new("cartpole", 7, &env));
    size_t obs_dim = 0, act_dim = 0;
    bool discrete = false;
    CHECK(xr_env_dims(env, &obs_dim, &act_dim, &discrete));
    double obs[4], next[4];
    CHECK(xr_env_reset(env, obs, 4));

    XrPerConfig per = xr_per_config_default();
    XrReplay *replay = NULL;
    CHECK(xr_replay_new(100, true, &per, 1, &replay));
    int steps = 0;
    for (;;) {
        double reward;
        bool done, truncated;
        size_t action = (size_t)(steps % 2);
        CHECK(xr_env_step_discrete(env, action, next, 4, &reward, &done, &truncated));
        CHECK(xr_replay_push_discrete(replay, obs, next, 4, action, reward, done, NULL));
        memcpy(obs, next, sizeof obs);
        steps++;
        if (done || truncated) break;
    }
    size_t idx[8];
    double w[8];
    CHECK(xr_replay_sample(replay, 8, idx, w));
    if (idx[0] != (size_t)(steps - 1) || w[0] != 1.0) {
        fprintf(stderr, "combined replay: first index %zu weight %f\n", idx[0], w[0]);
        return 1;
    }
    double td[8] = {1, 2, 3, 4, 5, 6, 7, 8};
    CHECK(xr_replay_update_priorities(replay, idx, td, 8));
    xr_replay_free(replay);
    xr_env_free(env);
    printf("ok %s %zu %zu %d %d\n", xr_version(), obs_dim, act_dim, (int)discrete, steps);
    return 0;
}
