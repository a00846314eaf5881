/* C interface to the double-chirp preamble detection library.
 *
 * All objects are opaque handles created by a dcpd_*_create/load/run call
 * and released with the matching *_free. Functions return a dcpd_status;
 * on failure dcpd_last_error() describes the problem (thread-local, valid
 * until the next failing call on the same thread).
 */
#ifndef DCPD_H
#define DCPD_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DCPD_API __declspec(dllexport)
#else
#define DCPD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dcpd_status {
  DCPD_OK = 0,
  DCPD_ERR_CONFIG = 1,
  DCPD_ERR_DIMENSION = 2,
  DCPD_ERR_CAPACITY = 3,
  DCPD_ERR_IO = 4,
  DCPD_ERR_INTERNAL = 5,
  DCPD_ERR_ARGUMENT = 6
} dcpd_status;

typedef struct dcpd_config dcpd_config;
typedef struct dcpd_result dcpd_result;
typedef struct dcpd_plan dcpd_plan;
typedef struct dcpd_stream dcpd_stream;

typedef struct dcpd_per_point {
  double snr_db;
  double per_overall;
  double per_missed;
  double per_wrong;
  int64_t trials;
  double ci_halfwidth;
} dcpd_per_point;

/* Called after every finished trial; `done` counts over the whole grid. */
typedef void (*dcpd_progress_fn)(int64_t done, int64_t total, void* user);

DCPD_API const char* dcpd_last_error(void);
DCPD_API const char* dcpd_version(void);

/* --- simulation config (flat `key = value` text) --- */
DCPD_API dcpd_status dcpd_config_default(dcpd_config** out);
DCPD_API dcpd_status dcpd_config_parse(const char* text, dcpd_config** out);
DCPD_API dcpd_status dcpd_config_load(const char* path, dcpd_config** out);
DCPD_API dcpd_status dcpd_config_set(dcpd_config* config, const char* key, const char* value);
/* Writes the config as text. `buffer` may be NULL to query the size; the
 * required size including the terminator goes to *needed. */
DCPD_API dcpd_status dcpd_config_format(const dcpd_config* config, char* buffer, size_t capacity,
                                        size_t* needed);
DCPD_API void dcpd_config_free(dcpd_config* config);

/* --- experiments --- */
DCPD_API dcpd_status dcpd_run_experiment(const dcpd_config* config, dcpd_progress_fn progress, void* user,
                                         dcpd_result** out);
DCPD_API dcpd_status dcpd_result_load_csv(const char* path, dcpd_result** out);
DCPD_API size_t dcpd_result_size(const dcpd_result* result);
DCPD_API dcpd_status dcpd_result_point(const dcpd_result* result, size_t index, dcpd_per_point* out);
DCPD_API dcpd_status dcpd_result_write_csv(const dcpd_result* result, const char* path);
/* SNR where the overall PER falls to `target`; *found is 0 when the grid
 * never reaches it. */
DCPD_API dcpd_status dcpd_result_crossing(const dcpd_result* result, double target, int* found,
                                          double* snr_db);
DCPD_API void dcpd_result_free(dcpd_result* result);

/* --- preamble assignment plans --- */
/* Accepts a plan file (m, n_preamble, ed.<id> = k1, k2) or a simulation
 * config, from which the experiment's plan is built. */
DCPD_API dcpd_status dcpd_plan_load(const char* path, dcpd_plan** out);
DCPD_API dcpd_status dcpd_plan_from_config(const dcpd_config* config, dcpd_plan** out);
DCPD_API size_t dcpd_plan_size(const dcpd_plan* plan);
DCPD_API dcpd_status dcpd_plan_entry(const dcpd_plan* plan, size_t index, int* ed_id, int* kappa1, int* kappa2,
                                     int* delta);
/* Number of constraint violations; messages via dcpd_plan_violation. */
DCPD_API size_t dcpd_plan_validate(dcpd_plan* plan);
DCPD_API const char* dcpd_plan_violation(const dcpd_plan* plan, size_t index);
DCPD_API void dcpd_plan_free(dcpd_plan* plan);

/* --- reception streams --- */
/* One Monte Carlo trial of `config` at `snr_db`, before detection. */
DCPD_API dcpd_status dcpd_stream_synthesize(const dcpd_config* config, double snr_db, uint64_t trial_index,
                                            dcpd_stream** out);
DCPD_API dcpd_status dcpd_stream_read(const char* path, dcpd_stream** out);
DCPD_API dcpd_status dcpd_stream_write(const dcpd_stream* stream, const char* path);
DCPD_API dcpd_status dcpd_stream_info(const dcpd_stream* stream, uint32_t* l, uint64_t* length, uint32_t* m,
                                      double* noise_var);
DCPD_API void dcpd_stream_free(dcpd_stream* stream);

/* Runs the detector over the whole stream and writes the events CSV
 * (ed_id, sample_index, three log-likelihoods). `path` may be NULL. */
DCPD_API dcpd_status dcpd_detect(const dcpd_stream* stream, const dcpd_plan* plan, int n_thr, const char* path,
                                 size_t* n_events);

/* --- named reproductions --- */
typedef struct dcpd_scenario_options {
  int has_seed;
  uint64_t seed;
  int64_t trials;  /* 0 keeps the scenario default */
  int threads;     /* 0 keeps the scenario default */
  const char* out; /* directory for CSV output; NULL writes nothing */
} dcpd_scenario_options;

DCPD_API size_t dcpd_scenario_count(void);
DCPD_API const char* dcpd_scenario_name(size_t index);
/* Runs a scenario; *report receives a human-readable summary to be freed
 * with dcpd_string_free. Returns DCPD_ERR_INTERNAL when a resemblance
 * check fails. */
DCPD_API dcpd_status dcpd_scenario_run(const char* name, const dcpd_scenario_options* options,
                                       dcpd_progress_fn progress, void* user, char** report);
DCPD_API void dcpd_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* DCPD_H */
