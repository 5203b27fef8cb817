/* lap2d — limiting-absorption studies for planar divergence-form operators.
 *
 * C interface to the study harness. All entry points are thread-compatible:
 * distinct handles may be used from distinct threads, but a single handle
 * must not be shared without external synchronization. Error details for
 * the calling thread are available via lap2d_last_error().
 */
#ifndef LAP2D_H
#define LAP2D_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define LAP2D_API __declspec(dllexport)
#else
#define LAP2D_API __attribute__((visibility("default")))
#endif

/* Status codes; these match the CLI process exit codes where applicable. */
typedef enum lap2d_status {
  LAP2D_OK = 0,               /* success, all checks passed          */
  LAP2D_CHECK_FAILED = 1,     /* study ran; at least one check red   */
  LAP2D_ERR_CONFIG = 2,       /* invalid configuration               */
  LAP2D_ERR_SOLVER = 3,       /* linear solver failed to converge    */
  LAP2D_ERR_INVALID_ARG = 4,  /* null handle / bad call              */
  LAP2D_ERR_IO = 5,           /* file could not be read or written   */
  LAP2D_ERR_INTERNAL = 6      /* unexpected failure                  */
} lap2d_status;

typedef struct lap2d_config lap2d_config;   /* study configuration  */
typedef struct lap2d_report lap2d_report;   /* completed study       */

/* Library version as "major.minor.patch". Static storage; do not free. */
LAP2D_API const char* lap2d_version(void);

/* Message describing the most recent failure on this thread, or an empty
 * string. Static thread-local storage; valid until the next API call on
 * the same thread. Do not free. */
LAP2D_API const char* lap2d_last_error(void);

/* --- configuration ----------------------------------------------------- */

/* Creates a configuration populated with defaults (lap-zero study of the
 * identity-dipole problem). Returns NULL on allocation failure. */
LAP2D_API lap2d_config* lap2d_config_create(void);

LAP2D_API void lap2d_config_free(lap2d_config* config);

/* Loads `key = value` lines (with # comments) from a file, replacing the
 * current contents of `config`. */
LAP2D_API lap2d_status lap2d_config_load(lap2d_config* config,
                                         const char* path);

/* Sets a single key. Keys: study, problem, grid_half_width, grid_n,
 * eps_ladder, k_ladder, k, b, trace_m, threads, out_dir, write_fields,
 * and tol.<name> overrides. */
LAP2D_API lap2d_status lap2d_config_set(lap2d_config* config, const char* key,
                                        const char* value);

/* --- running studies ---------------------------------------------------- */

/* Runs the configured study. On success (LAP2D_OK or LAP2D_CHECK_FAILED),
 * *out_report receives a report handle owned by the caller. On error the
 * handle is untouched. */
LAP2D_API lap2d_status lap2d_study_run(const lap2d_config* config,
                                       lap2d_report** out_report);

LAP2D_API void lap2d_report_free(lap2d_report* report);

/* 1 when every check in the report passed, 0 otherwise. */
LAP2D_API int lap2d_report_passed(const lap2d_report* report);

/* JSON document for the report. `include_timing` of 0 omits the wall-clock
 * subtree so that two runs of the same configuration compare bitwise equal.
 * The returned string must be released with lap2d_string_free(). */
LAP2D_API char* lap2d_report_json(const lap2d_report* report,
                                  int include_timing);

/* Writes report.json and the CSV tables into the configured out_dir. */
LAP2D_API lap2d_status lap2d_report_write(const lap2d_report* report);

/* --- diagnostics -------------------------------------------------------- */

/* Runs the built-in smoke checks, printing one line per check to stdout.
 * Returns the number of failed checks. */
LAP2D_API int lap2d_selftest(void);

/* Human-readable list of the built-in problems. Release with
 * lap2d_string_free(). */
LAP2D_API char* lap2d_list_problems(void);

LAP2D_API void lap2d_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LAP2D_H */
