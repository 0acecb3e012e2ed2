#ifndef HALFLINE_NLS_H
#define HALFLINE_NLS_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(HALFLINE_NLS_BUILD)
#    define HL_API __declspec(dllexport)
#  else
#    define HL_API __declspec(dllimport)
#  endif
#else
#  define HL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hl_status {
    HL_OK = 0,
    HL_ERR_INVALID_ARGUMENT = 1,
    HL_ERR_DOMAIN_TOO_SHORT = 2,
    HL_ERR_CONFIGURATION = 3,
    HL_ERR_DOMAIN_VIOLATION = 4,
    HL_ERR_INTERNAL = 5,
    HL_ERR_PARSE = 6,
    HL_ERR_IO = 7,
    HL_ERR_NULL_ARGUMENT = 8,
    HL_ERR_OUT_OF_RANGE = 9
} hl_status;

/* Exit codes reported per experiment (hl_result_exit_code). */
#define HL_EXIT_OK 0
#define HL_EXIT_FAILURE 1
#define HL_EXIT_VALIDATION 2
#define HL_EXIT_BLOWUP 3
#define HL_EXIT_CONTRACTION 4

typedef struct hl_config hl_config;
typedef struct hl_result hl_result;
typedef struct hl_trajectory hl_trajectory;

HL_API const char* hl_version(void);
HL_API const char* hl_status_name(hl_status status);

/* JSON error object of the last failing call on this thread; "" when none. */
HL_API const char* hl_last_error(void);
/* Exit code matching the last error (HL_EXIT_VALIDATION or HL_EXIT_FAILURE). */
HL_API int hl_last_error_exit_code(void);

/* Strings returned through char** are owned by the caller. */
HL_API void hl_string_free(char* s);
HL_API hl_status hl_presets_json(char** out);

HL_API hl_status hl_config_load(const char* path, hl_config** out);
/* base_dir may be NULL; relative paths in the config then resolve against the working directory. */
HL_API hl_status hl_config_parse(const char* json_text, const char* base_dir, hl_config** out);
HL_API void hl_config_free(hl_config* config);
HL_API size_t hl_config_run_count(const hl_config* config);
/* Validates every run; stops at the first failure. */
HL_API hl_status hl_config_validate(const hl_config* config);
/* Redirects every run's output directory. */
HL_API hl_status hl_config_set_output_dir(hl_config* config, const char* dir);

/* threads <= 0 uses the HALFLINE_NLS_THREADS cap. Per-run failures are recorded in the result. */
HL_API hl_status hl_run(const hl_config* config, int threads, hl_result** out);
HL_API void hl_result_free(hl_result* result);
HL_API size_t hl_result_count(const hl_result* result);
HL_API const char* hl_result_name(const hl_result* result, size_t index);
HL_API int hl_result_exit_code(const hl_result* result, size_t index);
/* First nonzero per-run exit code, else 0. */
HL_API int hl_result_overall_exit_code(const hl_result* result);
/* Summary (or error object) JSON, borrowed from the result. */
HL_API const char* hl_result_summary(const hl_result* result, size_t index);

/* Solves run `index` of the config and keeps the trajectory. */
HL_API hl_status hl_solve(const hl_config* config, size_t index, hl_trajectory** out);
HL_API void hl_trajectory_free(hl_trajectory* traj);
HL_API size_t hl_trajectory_length(const hl_trajectory* traj);
HL_API size_t hl_trajectory_nodes(const hl_trajectory* traj);
HL_API const char* hl_trajectory_status(const hl_trajectory* traj);
HL_API double hl_trajectory_status_time(const hl_trajectory* traj);
HL_API hl_status hl_trajectory_time(const hl_trajectory* traj, size_t k, double* t);
/* Copies u(x_j, t_k), j = 0..nodes-1; n must equal hl_trajectory_nodes. */
HL_API hl_status hl_trajectory_field(const hl_trajectory* traj, size_t k, double* re, double* im, size_t n);

#ifdef __cplusplus
}
#endif

#endif
