/* C interface to the totally real mean curvature flow simulator. */
#ifndef TRMCF_H
#define TRMCF_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define TRMCF_API __declspec(dllexport)
#else
#define TRMCF_API __attribute__((visibility("default")))
#endif

/* Status codes double as process exit codes. */
typedef enum trmcf_status {
  TRMCF_OK = 0,
  TRMCF_ERR_GENERIC = 1, /* invalid argument, or verification failed */
  TRMCF_ERR_CONFIG = 2,
  TRMCF_ERR_BLOWUP = 3, /* blow-up, chart guard, immersion or totally-real failure */
  TRMCF_ERR_SOLVER = 4,
  TRMCF_ERR_IO = 5
} trmcf_status;

typedef struct trmcf_config trmcf_config;
typedef struct trmcf_state trmcf_state;

/* Message of the last failing call on this thread; never NULL. */
TRMCF_API const char* trmcf_last_error(void);

TRMCF_API int trmcf_config_parse(const char* text, trmcf_config** out);
TRMCF_API int trmcf_config_load(const char* path, trmcf_config** out);
TRMCF_API int trmcf_config_default(trmcf_config** out);
TRMCF_API int trmcf_config_set(trmcf_config* config, const char* key, const char* value);
/* Resolved key = value text; valid until the next call on this config. */
TRMCF_API const char* trmcf_config_resolved(trmcf_config* config);
TRMCF_API void trmcf_config_free(trmcf_config* config);

/* Runs the experiment and writes its artifacts; returns the exit status. */
TRMCF_API int trmcf_run(const trmcf_config* config, int quiet);
/* Identity/spectrum refinement ladder; writes verification.json. */
TRMCF_API int trmcf_verify(const trmcf_config* config, int quiet);

TRMCF_API size_t trmcf_preset_count(void);
TRMCF_API const char* trmcf_preset_name(size_t index);
TRMCF_API const char* trmcf_preset_description(size_t index);

TRMCF_API int trmcf_state_from_config(const trmcf_config* config, trmcf_state** out);
TRMCF_API int trmcf_state_load(const char* path, trmcf_state** out);
TRMCF_API int trmcf_state_save(const trmcf_state* state, const char* path);
/* One accepted flow step with the config's flow settings; dt may be NULL. */
TRMCF_API int trmcf_state_step(trmcf_state* state, const trmcf_config* config, double* dt);
TRMCF_API double trmcf_state_time(const trmcf_state* state);
TRMCF_API size_t trmcf_state_node_count(const trmcf_state* state);
TRMCF_API int trmcf_state_real_dim(const trmcf_state* state);
/* Copies node coordinates (node_count * real_dim doubles) into buffer of capacity count. */
TRMCF_API int trmcf_state_points(const trmcf_state* state, double* buffer, size_t count);
/* JSON summary (grid, ambient, sup norms); valid until the next call on this state. */
TRMCF_API const char* trmcf_state_summary(trmcf_state* state);
TRMCF_API void trmcf_state_free(trmcf_state* state);

#ifdef __cplusplus
}
#endif

#endif
