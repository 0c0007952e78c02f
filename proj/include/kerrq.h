#ifndef KERRQ_H
#define KERRQ_H

/* C interface to the kerrq library. Every function returning int reports a
 * kerrq_status; on failure kerrq_last_error() describes the problem (per
 * thread, valid until the next failing call on that thread). */

#include <stddef.h>

#if defined(_WIN32)
#define KERRQ_API __declspec(dllexport)
#else
#define KERRQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kerrq_status {
  KERRQ_OK = 0,
  KERRQ_ERR_INVALID_ARGUMENT = 1,
  KERRQ_ERR_TRUNCATION = 2,
  KERRQ_ERR_COVERAGE = 3,
  KERRQ_ERR_NUMERICAL = 4,
  KERRQ_ERR_CONFIG = 5,
  KERRQ_ERR_IO = 6,
  KERRQ_ERR_INTERNAL = 99
} kerrq_status;

typedef struct kerrq_state kerrq_state;
typedef struct kerrq_field kerrq_field;

KERRQ_API const char* kerrq_version(void);
KERRQ_API const char* kerrq_last_error(void);

/* States. Constructors allocate; release with kerrq_state_free. */
KERRQ_API int kerrq_state_fock(int n, int dim, kerrq_state** out);
KERRQ_API int kerrq_state_coherent(double alpha_re, double alpha_im, int dim, kerrq_state** out);
KERRQ_API int kerrq_state_squeezed_vacuum(double r, int dim, kerrq_state** out);
/* Displacement beta = <a>, squeezing S(r) with x anti-squeezed for r > 0. */
KERRQ_API int kerrq_state_squeezed_coherent(double beta_re, double beta_im, double r, int dim,
                                            kerrq_state** out);
KERRQ_API int kerrq_state_thermal(double n_th, int dim, kerrq_state** out);
KERRQ_API int kerrq_state_squeezed_thermal(double n_th, double r, int dim, kerrq_state** out);
KERRQ_API void kerrq_state_free(kerrq_state* s);

/* In-place channels. Loss turns a pure state into a mixed one. */
KERRQ_API int kerrq_state_kerr(kerrq_state* s, double chi_t);
KERRQ_API int kerrq_state_loss(kerrq_state* s, double reflectance);
KERRQ_API int kerrq_state_rotate(kerrq_state* s, double angle);

KERRQ_API int kerrq_state_dim(const kerrq_state* s, int* dim);
KERRQ_API int kerrq_state_truncation_deficit(const kerrq_state* s, double* deficit);
/* out: mean_n, mean_x, mean_p, var_x, var_p, purity. paper_convention != 0
 * selects vacuum variance 1 instead of 1/2. */
KERRQ_API int kerrq_state_moments(const kerrq_state* s, int paper_convention, double out[6]);

/* Phase-space fields on the suggested grid for the state. */
KERRQ_API int kerrq_field_wigner(const kerrq_state* s, double padding, kerrq_field** out);
KERRQ_API int kerrq_field_husimi(const kerrq_state* s, double padding, kerrq_field** out);
KERRQ_API void kerrq_field_free(kerrq_field* f);
/* bounds: x_min, x_max, p_min, p_max (canonical). */
KERRQ_API int kerrq_field_shape(const kerrq_field* f, int* nx, int* np, double bounds[4]);
/* Copies nx*np values, x index slowest. */
KERRQ_API int kerrq_field_values(const kerrq_field* f, double* buf, size_t len);
KERRQ_API int kerrq_field_negativity(const kerrq_field* f, double* volume);
KERRQ_API int kerrq_field_normalization_residual(const kerrq_field* f, double* residual);

/* Squeezed thermal parameters of BSV with N photons after loss R.
 * out: r, n_th, purity, var_max, var_min. */
KERRQ_API int kerrq_lossy_bsv(double n_photons, double reflectance, double out[5]);

/* Scenario runner. config_json is a JSON object; has_seed != 0 makes seed
 * override the config's seed; threads <= 0 keeps the default. */
KERRQ_API int kerrq_run_scenario(const char* name, const char* config_json, const char* out_dir,
                                 unsigned long long seed, int has_seed, int threads);
KERRQ_API int kerrq_run_scenario_file(const char* name, const char* config_path,
                                      const char* out_dir, unsigned long long seed, int has_seed,
                                      int threads);
/* Scenario names joined by '\n'. */
KERRQ_API const char* kerrq_scenario_names(void);

#ifdef __cplusplus
}
#endif

#endif
