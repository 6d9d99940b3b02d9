/* Exercises the shared library through its C header only. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "varq/varq.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expectation failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static const char* good_config =
    "{\"scenario\":\"eigen\",\"grid\":{\"axes\":[{\"points\":1024,\"min\":-10,\"max\":10}]},"
    "\"physics\":{\"potential\":{\"type\":\"harmonic\",\"k\":1}},\"levels\":3}";

static void test_version(void) { EXPECT(strlen(varq_version()) > 0); }

static void test_validate(void) {
  char* diags = NULL;
  EXPECT(varq_validate_config(good_config, &diags) == VARQ_OK);
  EXPECT(diags && strcmp(diags, "[]") == 0);
  varq_string_free(diags);

  diags = NULL;
  EXPECT(varq_validate_config("{\"scenario\":\"eigen\",\"grid\":{\"axes\":[{\"points\":64,\"min\":0,\"max\":1}]},"
                              "\"physics\":{\"masses\":[-2]}}",
                              &diags) == VARQ_ERR_INVALID_CONFIG);
  EXPECT(diags && strstr(diags, "physics.masses[0]") != NULL);
  EXPECT(strstr(varq_last_error(), "physics.masses[0]") != NULL);
  varq_string_free(diags);

  EXPECT(varq_validate_config(NULL, &diags) == VARQ_ERR_INVALID_ARGUMENT);
}

static void test_run(void) {
  varq_report* report = NULL;
  EXPECT(varq_run("eigen", good_config, 0, 0, &report) == VARQ_OK);
  EXPECT(report != NULL);
  EXPECT(varq_report_passed(report) == 1);
  EXPECT(varq_report_exit_code(report) == 0);
  EXPECT(varq_report_check_count(report) == 2);

  const char* name = NULL;
  double value = -1.0, tol = -1.0;
  int passed = 0;
  EXPECT(varq_report_check(report, 1, &name, &value, &tol, &passed) == VARQ_OK);
  EXPECT(name && strcmp(name, "max_energy_error") == 0);
  EXPECT(value >= 0.0 && value <= tol && passed == 1);
  EXPECT(varq_report_check(report, 99, &name, NULL, NULL, NULL) == VARQ_ERR_INVALID_ARGUMENT);

  char* json = NULL;
  EXPECT(varq_report_json(report, &json) == VARQ_OK);
  EXPECT(json && strstr(json, "\"config_hash\"") != NULL);
  EXPECT(json && strstr(json, "\"scenario\": \"eigen\"") != NULL);
  varq_string_free(json);

  char* written = NULL;
  EXPECT(varq_report_emit_plots(report, "capi_plots", "spectrum", &written) == VARQ_OK);
  EXPECT(written && strstr(written, "spectrum.dat") != NULL);
  varq_string_free(written);
  EXPECT(varq_report_emit_plots(report, "capi_plots", "no_such_series", NULL) == VARQ_ERR_INVALID_ARGUMENT);
  varq_report_free(report);

  report = NULL;
  EXPECT(varq_run("evolve", good_config, 0, 0, &report) == VARQ_ERR_INVALID_CONFIG);
  EXPECT(report == NULL);
  EXPECT(varq_run(NULL, "not json", 0, 0, &report) == VARQ_ERR_INVALID_CONFIG);
  varq_report_free(NULL);
}

static void test_kernels(void) {
  enum { n = 2048 };
  static double rho[n], q[n];
  const double lo = -12.0, hi = 12.0, h = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double x = lo + h * i;
    rho[i] = exp(-x * x / 2.0) / sqrt(2.0 * 3.14159265358979323846);
  }
  EXPECT(varq_bohm_potential_1d(n, lo, hi, VARQ_DIRICHLET, 4, 1.0, 1.0, rho, q) == VARQ_OK);
  /* Q(0) = 1/(4 sigma^2) for a unit Gaussian. */
  EXPECT(fabs(q[n / 2] - (0.25 - (lo + h * (n / 2)) * (lo + h * (n / 2)) / 8.0)) < 1e-6);
  EXPECT(varq_bohm_potential_1d(n, lo, hi, VARQ_DIRICHLET, 3, 1.0, 1.0, rho, q) == VARQ_ERR_INVALID_ARGUMENT);
  EXPECT(varq_bohm_potential_1d(4, lo, hi, VARQ_DIRICHLET, 4, 1.0, 1.0, rho, q) == VARQ_ERR_INVALID_ARGUMENT);

  double e[3];
  EXPECT(varq_harmonic_levels(1024, -10, 10, 1.0, 1.0, 1.0, 0.0, 3, e) == VARQ_OK);
  for (int i = 0; i < 3; ++i) EXPECT(fabs(e[i] - (i + 0.5)) < 1e-3);
  EXPECT(varq_harmonic_levels(1024, -10, 10, 1.0, -1.0, 1.0, 0.0, 3, e) != VARQ_OK);
  EXPECT(strlen(varq_last_error()) > 0);
}

int main(void) {
  test_version();
  test_validate();
  test_run();
  test_kernels();
  if (failures) {
    fprintf(stderr, "%d expectation(s) failed\n", failures);
    return 1;
  }
  printf("capi: all expectations passed\n");
  return 0;
}
