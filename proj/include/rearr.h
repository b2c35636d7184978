#ifndef REARR_H
#define REARR_H

/* C interface to the rearrangement library.  All functions return a
 * rearr_status; outputs are written through pointers.  On failure the
 * thread-local message from rearr_last_error() describes what went wrong. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rearr_status {
  REARR_OK = 0,
  REARR_ERR_DOMAIN = 1,       /* argument outside the mathematical domain */
  REARR_ERR_SHAPE = 2,        /* incompatible grids or malformed geometry */
  REARR_ERR_PRECONDITION = 3, /* runtime barrier/window requirement failed */
  REARR_ERR_CONFIG = 4,       /* bad user-facing parameter or config key */
  REARR_ERR_NUMERIC = 5,      /* quadrature or FFT could not reach tolerance */
  REARR_ERR_IO = 6,           /* file missing, unwritable, or unparsable */
  REARR_ERR_UNSUPPORTED = 7,  /* valid request outside implemented scope */
  REARR_ERR_GATE = 8,         /* experiment finished but a quality gate failed */
  REARR_ERR_INTERNAL = 9      /* unexpected failure; report as a bug */
} rearr_status;

/* Opaque handle for a piecewise-linear function on a uniform grid. */
typedef struct rearr_grid rearr_grid;

const char* rearr_version(void);

/* Message from the most recent failing call on this thread ("" if none). */
const char* rearr_last_error(void);

/* ---- grid lifecycle ---- */

/* Copies m values sampled at the nodes of [lo, hi] (m >= 2). */
rearr_status rearr_grid_create(double lo, double hi, const double* values,
                               size_t m, rearr_grid** out);
void rearr_grid_free(rearr_grid* g);

size_t rearr_grid_size(const rearr_grid* g);
double rearr_grid_lo(const rearr_grid* g);
double rearr_grid_hi(const rearr_grid* g);

/* out must hold rearr_grid_size(g) doubles. */
rearr_status rearr_grid_copy_values(const rearr_grid* g, double* out,
                                    size_t capacity);

/* Piecewise-linear evaluation; t must lie inside the grid interval. */
rearr_status rearr_grid_evaluate(const rearr_grid* g, double t, double* out);

/* CSV with header "t,value"; nodes must be uniformly spaced. */
rearr_status rearr_grid_read_csv(const char* path, rearr_grid** out);
rearr_status rearr_grid_write_csv(const rearr_grid* g, const char* path);

/* ---- measure-theoretic operations ---- */

/* norm is "sup", "l1" or "l2"; both grids must share interval and size. */
rearr_status rearr_distance(const rearr_grid* f, const rearr_grid* g,
                            const char* norm, double* out);

rearr_status rearr_integral(const rearr_grid* g, double* out);

/* Measure of {t : g(t) > u} under the uniform cell weights. */
rearr_status rearr_upper_level_set(const rearr_grid* g, double u, double* out);

/* Decreasing rearrangement onto the same interval. */
rearr_status rearr_rearrange(const rearr_grid* g, rearr_grid** out);

/* Rearrangement of a nonnegative estimate onto [0, length]; sets
 * *truncation_warning (if non-null) when the retained tail cell still
 * carries more than tail_mass_bound of mass. */
rearr_status rearr_rearrange_density(const rearr_grid* g,
                                     double tail_mass_bound, rearr_grid** out,
                                     int* truncation_warning);

/* Rearranges over (outer_lo, outer_hi) and returns the restriction to
 * [inner_lo, inner_hi]; barrier is the level M the outside must clear. */
rearr_status rearr_rearrange_local(const rearr_grid* g, double inner_lo,
                                   double inner_hi, double outer_lo,
                                   double outer_hi, double barrier,
                                   rearr_grid** out);

/* ---- stochastic building blocks ---- */

/* regime is "iid" (uses sigma), "ar1" (rho, sigma_e) or "lrd" (d, r).
 * Writes n values into out. */
rearr_status rearr_generate_series(const char* regime, size_t n,
                                   uint64_t seed, double sigma, double rho,
                                   double sigma_e, double d, int r,
                                   double* out);

/* Fractional Gaussian noise, hurst in [0.5, 1). */
rearr_status rearr_fgn(size_t n, double hurst, uint64_t seed, double* out);

/* Samples of the rearranged limit process at the origin.  process is
 * "brownian" or "fbm" (beta in (0.5, 1) applies to fbm only).  out must
 * hold n_draws doubles; draws abandoned after repeated window doublings
 * are written as NaN and counted in *dropped (if non-null). */
rearr_status rearr_limit_draws(double A, double Delta, double c,
                               const char* process, double beta,
                               const char* kernel, double window,
                               double grid_step, size_t n_draws,
                               uint64_t seed, int threads, double* out,
                               size_t* dropped);

/* ---- experiments ---- */

/* Runs the experiment described by the config file and writes errors.csv,
 * summary.csv, limit_draws.csv and report.txt into out_dir.  Returns
 * REARR_ERR_GATE when the run completed but a declared gate failed (the
 * report is still written). */
rearr_status rearr_experiment_run(const char* config_path,
                                  const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* REARR_H */
