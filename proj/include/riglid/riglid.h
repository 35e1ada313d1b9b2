/* riglid: rigid-lid water-waves laboratory, C interface.
 *
 * All functions return a riglid_status. On failure a message for the calling
 * thread is available from riglid_last_error() until the next failing call.
 * Handles are opaque; free them with the matching *_free function.
 */
#ifndef RIGLID_RIGLID_H
#define RIGLID_RIGLID_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define RIGLID_API __attribute__((visibility("default")))
#else
#define RIGLID_API
#endif

typedef enum {
  RIGLID_OK = 0,
  RIGLID_ERR_CONFIG = 1,
  RIGLID_ERR_SHAPE = 2,
  RIGLID_ERR_PRECONDITION = 3,
  RIGLID_ERR_SOLVER = 4,
  RIGLID_ERR_ADMISSIBILITY = 5,
  RIGLID_ERR_GEOMETRY = 6,
  RIGLID_ERR_CONTEXT = 7,
  RIGLID_ERR_QUADRATURE = 8,
  RIGLID_ERR_SINGULARITY = 9,
  RIGLID_ERR_IO = 10,
  RIGLID_ERR_ARGUMENT = 20, /* null pointer, bad index, short buffer */
  RIGLID_ERR_INTERNAL = 99
} riglid_status;

/* process exit codes used by riglid_result_exit_code */
#define RIGLID_EXIT_PASS 0
#define RIGLID_EXIT_ASSERTION 1
#define RIGLID_EXIT_CONFIG 2
#define RIGLID_EXIT_RUNTIME 3

typedef struct riglid_config riglid_config;
typedef struct riglid_result riglid_result;
typedef struct riglid_solver riglid_solver;

RIGLID_API const char* riglid_version(void);
RIGLID_API const char* riglid_last_error(void);

/* experiments */
RIGLID_API int riglid_experiment_count(void);
RIGLID_API const char* riglid_experiment_name(int index);

/* configuration: defaults for an experiment, a file, or `key = value` text */
RIGLID_API riglid_status riglid_config_new(const char* experiment, riglid_config** out);
RIGLID_API riglid_status riglid_config_load(const char* path, const char* experiment_override, riglid_config** out);
RIGLID_API riglid_status riglid_config_parse(const char* text, riglid_config** out);
/* changing "experiment" resets every other key to that experiment's defaults */
RIGLID_API riglid_status riglid_config_set(riglid_config* c, const char* key, const char* value);
/* writes a NUL-terminated value; *needed (optional) receives the required size.
 * buf = NULL with needed set is a size query. */
RIGLID_API riglid_status riglid_config_get(const riglid_config* c, const char* key, char* buf, size_t len,
                                           size_t* needed);
RIGLID_API riglid_status riglid_config_serialize(const riglid_config* c, char* buf, size_t len, size_t* needed);
RIGLID_API riglid_status riglid_config_validate(const riglid_config* c);
RIGLID_API void riglid_config_free(riglid_config* c);

/* run an experiment, writing CSVs and manifest.json into out_dir */
RIGLID_API riglid_status riglid_run(const riglid_config* c, const char* out_dir, int jobs, riglid_result** out);
RIGLID_API int riglid_result_exit_code(const riglid_result* r);
RIGLID_API int riglid_result_complete(const riglid_result* r);
RIGLID_API const char* riglid_result_error(const riglid_result* r);
RIGLID_API double riglid_result_wall_time(const riglid_result* r);
RIGLID_API int riglid_result_assertion_count(const riglid_result* r);
RIGLID_API riglid_status riglid_result_assertion(const riglid_result* r, int index, const char** id, int* criterion,
                                                 int* passed, double* measured, double* threshold,
                                                 const char** detail);
RIGLID_API int riglid_result_output_count(const riglid_result* r);
RIGLID_API const char* riglid_result_output(const riglid_result* r, int index);
RIGLID_API void riglid_result_free(riglid_result* r);

/* numerics on a periodic cell of length L with n nodes (x_i = -L/2 + i L/n) */
RIGLID_API riglid_status riglid_linear_propagate(double L, int n, double mu, double eps, double t,
                                                 const double* zeta, const double* psi, double* zeta_out,
                                                 double* psi_out);
/* mode: "elliptic", "expansion1" or "flat" */
RIGLID_API riglid_status riglid_dn_apply(double L, int n, double mu, int nz, double eps, const char* mode,
                                         const double* zeta, const double* psi, double* out);
RIGLID_API riglid_status riglid_null_check(double L, int n, double mu, int nz, uint64_t seed, double* residual);

/* nonlinear stepper */
RIGLID_API riglid_status riglid_solver_new(double L, int n, double eps, double mu, int nz, double dt,
                                           const char* mode, riglid_solver** out);
RIGLID_API riglid_status riglid_solver_step(const riglid_solver* s, const double* zeta, const double* psi,
                                            double dt, double* zeta_out, double* psi_out);
/* 1/2 |zeta|^2 + (G psi, psi) / (2 mu) */
RIGLID_API riglid_status riglid_solver_hamiltonian(const riglid_solver* s, const double* zeta, const double* psi,
                                                   double* value);
RIGLID_API void riglid_solver_free(riglid_solver* s);

#ifdef __cplusplus
}
#endif

#endif
