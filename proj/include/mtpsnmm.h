/* mtpsnmm — structural nested mean models for modified treatment policies.
 *
 * C API over the C++ core: opaque handles, integer status codes, JSON
 * payloads. Every function returns MTPSNMM_OK (0) on success; on failure the
 * thread-local message from mtpsnmm_last_error() describes what went wrong.
 * Strings returned through char** out-parameters are heap-allocated and must
 * be released with mtpsnmm_string_free().
 */
#ifndef MTPSNMM_H
#define MTPSNMM_H

#ifdef __cplusplus
extern "C" {
#endif

#define MTPSNMM_OK 0
#define MTPSNMM_ERR_CONFIG 1
#define MTPSNMM_ERR_DATA 2
#define MTPSNMM_ERR_NUMERIC 3

typedef struct mtpsnmm_panel mtpsnmm_panel;
typedef struct mtpsnmm_report mtpsnmm_report;

const char* mtpsnmm_version(void);

/* Last error message of the calling thread; empty string when none. */
const char* mtpsnmm_last_error(void);

/* Load a CSV panel. config_json needs at least {"layout": ..., "columns":
 * {...}} (the same schema the `fit` config uses; extra fields are ignored
 * here). */
int mtpsnmm_panel_read_csv(const char* path, const char* config_json, mtpsnmm_panel** out);
int mtpsnmm_panel_parse_csv(const char* text, const char* config_json, mtpsnmm_panel** out);
int mtpsnmm_panel_n_units(const mtpsnmm_panel* panel);
int mtpsnmm_panel_horizon(const mtpsnmm_panel* panel);
void mtpsnmm_panel_free(mtpsnmm_panel* panel);

/* Data/config cross-checks without fitting. */
int mtpsnmm_validate(const mtpsnmm_panel* panel, const char* config_json);

/* Run the configured estimator; see README for the config schema. */
int mtpsnmm_fit(const mtpsnmm_panel* panel, const char* config_json, mtpsnmm_report** out);

int mtpsnmm_report_dim(const mtpsnmm_report* report);
int mtpsnmm_report_psi(const mtpsnmm_report* report, double* out, int capacity);
int mtpsnmm_report_se(const mtpsnmm_report* report, double* out, int capacity);
/* Row-major d x d covariance; capacity counts doubles. */
int mtpsnmm_report_vcov(const mtpsnmm_report* report, double* out, int capacity);
int mtpsnmm_report_json(const mtpsnmm_report* report, char** out);
int mtpsnmm_report_text(const mtpsnmm_report* report, char** out);
void mtpsnmm_report_free(mtpsnmm_report* report);

/* Monte Carlo harness. config_json: {"design": "point" | "longitudinal" |
 * "pt-point" | "pt-two-period" | "point-or", "n": ..., "reps": ...,
 * "seed": ..., "folds": ..., "boot": ..., "confounding": ...}.
 * Any of the three out-parameters may be NULL. */
int mtpsnmm_simulate(const char* config_json, char** summary_json, char** table_text, char** replicates_csv);

void mtpsnmm_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MTPSNMM_H */
