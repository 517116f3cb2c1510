/* Exercises the C interface from a C translation unit. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "mocu/mocu.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

static void test_status(void) {
  EXPECT(strlen(mocu_version()) > 0);
  EXPECT(strcmp(mocu_status_name(MOCU_OK), "ok") == 0);
  EXPECT(strcmp(mocu_status_name(MOCU_E_NULL_ARGUMENT), "null_argument") == 0);
  EXPECT(mocu_config_parse(NULL, NULL, NULL) == MOCU_E_NULL_ARGUMENT);
  EXPECT(strlen(mocu_last_error()) > 0);
}

static void test_config(void) {
  mocu_config* cfg = NULL;
  EXPECT(mocu_config_parse("seed = 1\nbogus = 2\n", "c.ini", &cfg) == MOCU_E_CONFIG);
  EXPECT(strstr(mocu_last_error(), "c.ini:2") != NULL);
  EXPECT(cfg == NULL);
  EXPECT(mocu_config_parse("seed = 5\n[kg-demo]\ninstances = 10\n", "c.ini", &cfg) == MOCU_OK);
  EXPECT(mocu_config_set(cfg, "kg-demo", "no_such_key", "1") == MOCU_E_CONFIG);
  EXPECT(strstr(mocu_config_resolved(cfg), "instances = 10") != NULL);
  EXPECT(mocu_config_set(cfg, "run", "out_dir", "capi_out") == MOCU_OK);

  mocu_report* rep = NULL;
  EXPECT(mocu_run(cfg, "nonsense", &rep) == MOCU_E_CONFIG);
  EXPECT(mocu_run(cfg, "kg-demo", &rep) == MOCU_OK);
  EXPECT(mocu_report_exit_code(rep) == 0);
  EXPECT(strstr(mocu_report_text(rep), "0 disagreements") != NULL);
  EXPECT(mocu_report_file_count(rep) == 2);
  EXPECT(mocu_report_file(rep, 5) == NULL);
  mocu_report_free(rep);
  mocu_config_free(cfg);
}

static void test_numerics(void) {
  /* E[max(Z, -Z)] = E|Z| = sqrt(2/pi) */
  const double a[2] = {0.0, 0.0}, b[2] = {1.0, -1.0};
  double v = 0.0;
  EXPECT(mocu_expected_max_affine(a, b, 2, &v) == MOCU_OK);
  EXPECT(fabs(v - sqrt(2.0 / 3.141592653589793)) < 1e-12);

  const double mean[2] = {0.0, 0.0}, cov[4] = {1.0, 0.0, 0.0, 4.0}, noise[2] = {1.0, 1.0};
  double values[2];
  size_t pick = 9;
  EXPECT(mocu_kg_policy(mean, cov, noise, 2, &pick, values) == MOCU_OK);
  EXPECT(pick == 1);
  EXPECT(values[1] > values[0]);
  const double bad_cov[4] = {1.0, 0.0, 0.0, -1.0};
  EXPECT(mocu_kg_policy(mean, bad_cov, noise, 2, &pick, NULL) != MOCU_OK);

  mocu_nig* nig = NULL;
  EXPECT(mocu_nig_create(&nig) == MOCU_OK);
  double m[3], shape, scale;
  EXPECT(mocu_nig_posterior(nig, m, &shape, &scale) == MOCU_E_NOT_PROPER);
  const double psi[5] = {1, 2, 3, 4, 5}, eps[5] = {0.1, -0.2, 0.05, 0.15, -0.1};
  for (int i = 0; i < 5; ++i) mocu_nig_update(nig, psi[i], -psi[i] * psi[i] + 4 * psi[i] + 1 + eps[i]);
  EXPECT(mocu_nig_proper(nig));
  EXPECT(mocu_nig_posterior(nig, m, &shape, &scale) == MOCU_OK);
  EXPECT(fabs(shape - 1.0) < 1e-12);
  EXPECT(fabs(m[0] + 1.0) < 0.2);
  double loc, s, dof;
  EXPECT(mocu_nig_predictive(nig, 2.0, &loc, &s, &dof) == MOCU_OK);
  EXPECT(fabs(dof - 2.0) < 1e-12);
  EXPECT(mocu_nig_update(nig, NAN, 1.0) == MOCU_E_DOMAIN);
  mocu_nig_free(nig);
}

static void test_gene(const char* dir) {
  char path[4096];
  snprintf(path, sizeof path, "%s/toy_r2.net", dir);
  mocu_gene* g = NULL;
  EXPECT(mocu_gene_load(path, &g) == MOCU_OK);
  if (!g) return;
  EXPECT(mocu_gene_experiment_count(g) == 2);
  double look[2], mocu = 0.0;
  size_t pick = 9;
  EXPECT(mocu_gene_design(g, &pick, look, &mocu) == MOCU_OK);
  EXPECT(pick == 1);
  EXPECT(fabs(mocu - 0.28) < 1e-10);
  mocu_gene_free(g);
  snprintf(path, sizeof path, "%s/missing.net", dir);
  EXPECT(mocu_gene_load(path, &g) != MOCU_OK);
}

int main(int argc, char** argv) {
  test_status();
  test_config();
  test_numerics();
  if (argc > 1) test_gene(argv[1]);
  if (failures) fprintf(stderr, "%d failures\n", failures);
  else printf("test_capi: all checks passed\n");
  return failures ? EXIT_FAILURE : EXIT_SUCCESS;
}
