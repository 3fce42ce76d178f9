/* C interface to the simulation engine. All entry points return an
 * ss_status; when a call fails, ss_last_error() describes why (the string is
 * thread-local and stays valid until the next failing call on that thread).
 * Strings returned through char** out-parameters are heap-allocated and must
 * be released with ss_string_free().
 */
#ifndef SOCIALSIM_H
#define SOCIALSIM_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ss_status {
    SS_OK = 0,
    SS_ERR_CONFIG = 2,  /* invalid configuration or input data */
    SS_ERR_RUNTIME = 3, /* runtime or checkpoint failure */
    SS_ERR_ARG = 4      /* null pointer or malformed argument */
} ss_status;

/* A simulation bound to its output directory. Creating one on a directory
 * that already holds checkpoints from the same config resumes after the last
 * completed day. */
typedef struct ss_sim ss_sim;

const char* ss_last_error(void);
void ss_string_free(char* s);
const char* ss_version(void);

/* overrides_json: NULL, empty, or an RFC 7386 merge patch applied to the
 * loaded config before validation (e.g. "{\"seed\": 7}"). */
ss_status ss_sim_create(const char* config_path, const char* overrides_json, ss_sim** out);
void ss_sim_destroy(ss_sim* sim);

/* Runs to completion and writes all four logs. */
ss_status ss_sim_run(ss_sim* sim);

/* Advances up to n simulated days; finishing the run also writes the memory
 * log. Safe to interleave with destroying and re-creating the session. */
ss_status ss_sim_run_days(ss_sim* sim, int n);

ss_status ss_sim_done(const ss_sim* sim, int* done);
ss_status ss_sim_day(const ss_sim* sim, int* day);
ss_status ss_sim_total_days(const ss_sim* sim, int* days);

/* Borrowed pointer, valid while sim lives. */
const char* ss_sim_output_dir(const ss_sim* sim);

/* Whether this session resumed from an existing checkpoint. */
ss_status ss_sim_resumed(const ss_sim* sim, int* resumed);

/* Runs the full model plus one ablated variant per axis with the same seed.
 * axes: comma-separated subset of "M,P,L"; NULL or "" means all three.
 * result_json describes the manifest path and the run directories. */
ss_status ss_ablate(const char* config_path, const char* overrides_json, const char* axes,
                    char** result_json);

/* target: a run directory or an ablation manifest. reference_path and
 * groups_path are optional canonical datasets (pass NULL to skip). Writes
 * report.json and report.csv next to the target; report_json receives the
 * report body. */
ss_status ss_evaluate(const char* target, const char* reference_path, const char* groups_path,
                      char** report_json);

/* kind: poi_table | trajectory_reference | group_profiles. Converts CSV or
 * line-delimited JSON into the canonical form plus a dataset manifest. */
ss_status ss_ingest(const char* input_path, const char* kind, const char* output_path,
                    char** manifest_json);

/* Renders one agent's day from the run logs. events receives the number of
 * narrative events (one per log record consumed); pass NULL to ignore. */
ss_status ss_replay(const char* run_dir, const char* agent_id, int day, char** text,
                    uint64_t* events);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SOCIALSIM_H */
