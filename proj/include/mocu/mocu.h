/* C interface to the mocu library. */
#ifndef MOCU_MOCU_H
#define MOCU_MOCU_H

#include <stddef.h>

#if defined(_WIN32)
#define MOCU_API __declspec(dllexport)
#else
#define MOCU_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mocu_status {
  MOCU_OK = 0,
  MOCU_E_DOMAIN = 1,
  MOCU_E_NUMERIC = 2,
  MOCU_E_IMPOSSIBLE_OUTCOME = 3,
  MOCU_E_NOT_PROPER = 4,
  MOCU_E_DEGENERATE = 5,
  MOCU_E_EXHAUSTED = 6,
  MOCU_E_DIVERGENCE = 7,
  MOCU_E_ENUMERATION_LIMIT = 8,
  MOCU_E_INCONSISTENT_OBSERVATION = 9,
  MOCU_E_RANK = 10,
  MOCU_E_PARSE = 11,
  MOCU_E_CONFIG = 12,
  MOCU_E_ENVIRONMENT = 13,
  MOCU_E_CONFIG_MISMATCH = 14,
  MOCU_E_IO = 15,
  MOCU_E_NULL_ARGUMENT = 16,
  MOCU_E_INTERNAL = 99
} mocu_status;

MOCU_API const char* mocu_version(void);
MOCU_API const char* mocu_status_name(mocu_status status);
/* Message of the last failed call on this thread ("" if none). */
MOCU_API const char* mocu_last_error(void);

/* Run configuration ------------------------------------------------------ */

typedef struct mocu_config mocu_config;

MOCU_API mocu_status mocu_config_load(const char* path, mocu_config** out);
MOCU_API mocu_status mocu_config_parse(const char* text, const char* source, mocu_config** out);
MOCU_API mocu_status mocu_config_set(mocu_config* config, const char* section, const char* key,
                                     const char* value);
/* Canonical text of every set key; owned by the config until the next call. */
MOCU_API const char* mocu_config_resolved(mocu_config* config);
MOCU_API void mocu_config_free(mocu_config* config);

/* Commands: "sim-quadratic", "gene-network", "surrogate", "kg-demo". */

typedef struct mocu_report mocu_report;

MOCU_API mocu_status mocu_run(const mocu_config* config, const char* command, mocu_report** out);
MOCU_API int mocu_report_exit_code(const mocu_report* report);
MOCU_API const char* mocu_report_text(const mocu_report* report);
MOCU_API size_t mocu_report_file_count(const mocu_report* report);
MOCU_API const char* mocu_report_file(const mocu_report* report, size_t index);
MOCU_API void mocu_report_free(mocu_report* report);

/* Numerics --------------------------------------------------------------- */

/* E[max_i (a_i + b_i Z)] for standard normal Z. */
MOCU_API mocu_status mocu_expected_max_affine(const double* a, const double* b, size_t n, double* out);

/* Knowledge-gradient choice for a correlated Gaussian belief. `covariance`
   is n x n row-major; `values` (optional) receives the n KG values. */
MOCU_API mocu_status mocu_kg_policy(const double* mean, const double* covariance, const double* noise,
                                    size_t n, size_t* experiment, double* values);

/* Normal-inverse-gamma belief over y = t1 psi^2 + t2 psi + t3 + N(0, s^2),
   starting from the noninformative prior. */
typedef struct mocu_nig mocu_nig;

MOCU_API mocu_status mocu_nig_create(mocu_nig** out);
MOCU_API mocu_status mocu_nig_update(mocu_nig* belief, double psi, double y);
MOCU_API int mocu_nig_proper(const mocu_nig* belief);
MOCU_API mocu_status mocu_nig_posterior(const mocu_nig* belief, double mean[3], double* shape, double* scale);
MOCU_API mocu_status mocu_nig_predictive(const mocu_nig* belief, double psi, double* location, double* scale,
                                         double* dof);
MOCU_API void mocu_nig_free(mocu_nig* belief);

/* Gene regulatory network fixture with its prior and experiment noise. */
typedef struct mocu_gene mocu_gene;

MOCU_API mocu_status mocu_gene_load(const char* path, mocu_gene** out);
MOCU_API size_t mocu_gene_experiment_count(const mocu_gene* gene);
/* `lookahead` (optional) receives one expected cost per experiment. */
MOCU_API mocu_status mocu_gene_design(const mocu_gene* gene, size_t* experiment, double* lookahead,
                                      double* mocu);
MOCU_API void mocu_gene_free(mocu_gene* gene);

#ifdef __cplusplus
}
#endif

#endif
