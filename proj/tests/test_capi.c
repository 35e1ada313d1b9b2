/* plain C client of the shared library */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "riglid/riglid.h"

static int failures = 0;

#define EXPECT(cond)                                                   \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

static const double PI = 3.14159265358979323846;

static void test_config(void) {
  riglid_config* c = NULL;
  char buf[256];
  size_t need = 0;
  EXPECT(riglid_experiment_count() == 14);
  EXPECT(riglid_experiment_name(99) == NULL);
  EXPECT(riglid_config_new("null-check", &c) == RIGLID_OK);
  EXPECT(riglid_config_get(c, "grid.n", buf, sizeof buf, NULL) == RIGLID_OK);
  EXPECT(strcmp(buf, "64") == 0);
  EXPECT(riglid_config_set(c, "params.mu", "0.25") == RIGLID_OK);
  EXPECT(riglid_config_get(c, "params.mu", buf, sizeof buf, NULL) == RIGLID_OK);
  EXPECT(strcmp(buf, "0.25") == 0);
  EXPECT(riglid_config_get(c, "params.mu", buf, 2, &need) == RIGLID_ERR_ARGUMENT);
  EXPECT(need == 5);
  EXPECT(riglid_config_set(c, "no.such", "1") == RIGLID_ERR_CONFIG);
  EXPECT(strstr(riglid_last_error(), "no.such") != NULL);
  EXPECT(riglid_config_set(c, "params.epsilon", "0") == RIGLID_OK);
  EXPECT(riglid_config_validate(c) == RIGLID_ERR_CONFIG);
  EXPECT(riglid_config_serialize(c, NULL, 0, &need) == RIGLID_OK);
  EXPECT(riglid_config_serialize(c, NULL, 0, NULL) == RIGLID_ERR_ARGUMENT);
  EXPECT(need > 100);
  riglid_config_free(c);
  EXPECT(riglid_config_new("bogus", &c) == RIGLID_ERR_CONFIG);
  EXPECT(riglid_config_new(NULL, &c) == RIGLID_ERR_ARGUMENT);
  EXPECT(riglid_config_parse("experiment = extension\n", &c) == RIGLID_OK);
  EXPECT(riglid_config_get(c, "grid.n_z", buf, sizeof buf, NULL) == RIGLID_OK);
  EXPECT(strcmp(buf, "64") == 0);
  riglid_config_free(c);
}

static void test_run(void) {
  riglid_config* c = NULL;
  riglid_result* r = NULL;
  const char *id = NULL, *detail = NULL;
  int crit = 0, passed = 0;
  double measured = 0, threshold = 0;
  EXPECT(riglid_config_new("null-check", &c) == RIGLID_OK);
  EXPECT(riglid_run(c, "capi_out", 1, &r) == RIGLID_OK);
  EXPECT(riglid_result_exit_code(r) == RIGLID_EXIT_PASS);
  EXPECT(riglid_result_complete(r) == 1);
  EXPECT(riglid_result_assertion_count(r) == 1);
  EXPECT(riglid_result_assertion(r, 0, &id, &crit, &passed, &measured, &threshold, &detail) == RIGLID_OK);
  EXPECT(strcmp(id, "null_solution") == 0);
  EXPECT(passed == 1 && measured <= threshold);
  EXPECT(riglid_result_assertion(r, 5, &id, &crit, &passed, &measured, &threshold, &detail) == RIGLID_ERR_ARGUMENT);
  EXPECT(riglid_result_output_count(r) == 2);
  riglid_result_free(r);

  EXPECT(riglid_config_set(c, "grid.n", "12") == RIGLID_OK);
  EXPECT(riglid_run(c, "capi_out", 1, &r) == RIGLID_OK);
  EXPECT(riglid_result_exit_code(r) == RIGLID_EXIT_CONFIG);
  EXPECT(riglid_result_complete(r) == 0);
  EXPECT(strlen(riglid_result_error(r)) > 0);
  riglid_result_free(r);
  riglid_config_free(c);
}

static void test_numerics(void) {
  enum { N = 64 };
  double zeta[N], psi[N], z1[N], p1[N], g[N], res = 1, h0 = 0, h1 = 0;
  const double L = 2 * PI, mu = 0.5, eps = 0.1, t = 0.7;
  int i;
  for (i = 0; i < N; ++i) {
    const double x = -L / 2 + i * L / N;
    zeta[i] = cos(x);
    psi[i] = 0;
  }
  /* one mode: zeta(t) = cos(omega t / eps) cos x */
  EXPECT(riglid_linear_propagate(L, N, mu, eps, t, zeta, psi, z1, p1) == RIGLID_OK);
  {
    const double om = sqrt(tanh(sqrt(mu)) / sqrt(mu));
    double err = 0;
    for (i = 0; i < N; ++i) err = fmax(err, fabs(z1[i] - cos(om * t / eps) * zeta[i]));
    EXPECT(err < 1e-12);
  }
  for (i = 0; i < N; ++i) zeta[i] = 0;
  for (i = 0; i < N; ++i) psi[i] = cos(-L / 2 + i * L / N);
  EXPECT(riglid_dn_apply(L, N, mu, 32, eps, "flat", zeta, psi, g) == RIGLID_OK);
  for (i = 0; i < N; ++i) EXPECT(fabs(g[i] - sqrt(mu) * tanh(sqrt(mu)) * psi[i]) < 1e-12);
  EXPECT(riglid_dn_apply(L, N, mu, 32, eps, "sideways", zeta, psi, g) == RIGLID_ERR_CONFIG);
  EXPECT(riglid_dn_apply(L, 12, mu, 32, eps, "flat", zeta, psi, g) != RIGLID_OK);

  EXPECT(riglid_null_check(L, N, mu, 16, 5, &res) == RIGLID_OK);
  EXPECT(res < 1e-10);

  {
    riglid_solver* s = NULL;
    for (i = 0; i < N; ++i) {
      const double x = -L / 2 + i * L / N;
      zeta[i] = 0.5 * cos(x);
      psi[i] = 0.2 * sin(x);
    }
    EXPECT(riglid_solver_new(L, N, eps, mu, 16, 1e-3, "elliptic", &s) == RIGLID_OK);
    EXPECT(riglid_solver_hamiltonian(s, zeta, psi, &h0) == RIGLID_OK);
    EXPECT(riglid_solver_step(s, zeta, psi, 1e-2, z1, p1) == RIGLID_OK);
    EXPECT(riglid_solver_hamiltonian(s, z1, p1, &h1) == RIGLID_OK);
    EXPECT(fabs(h1 - h0) < 1e-8 * h0);
    for (i = 0; i < N; ++i) zeta[i] = -20;
    EXPECT(riglid_solver_step(s, zeta, psi, 1e-2, z1, p1) == RIGLID_ERR_ADMISSIBILITY);
    riglid_solver_free(s);
  }
  EXPECT(riglid_solver_new(L, N, 0, mu, 16, 1e-3, "elliptic", NULL) == RIGLID_ERR_ARGUMENT);
}

int main(void) {
  EXPECT(strlen(riglid_version()) > 0);
  test_config();
  test_run();
  test_numerics();
  if (failures) fprintf(stderr, "%d failure(s)\n", failures);
  else printf("capi: all checks passed\n");
  return failures ? 1 : 0;
}
