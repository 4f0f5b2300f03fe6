/* C interface to the betacop library: nonparametric copula estimators,
 * Bernstein coefficient validation, empirical beta copula sampling, and the
 * Monte Carlo performance harness.
 *
 * All functions return bc_status (BC_OK on success). On failure,
 * bc_last_error() returns a thread-local message describing what went wrong.
 * Out-parameters are written only on success. Every bc_* handle is owned by
 * the caller and released with the matching *_free function.
 */
#ifndef BETACOP_H
#define BETACOP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bc_status {
  BC_OK = 0,
  BC_EINVAL = 1,      /* null handle / bad argument */
  BC_EDOMAIN = 2,     /* argument outside its mathematical domain */
  BC_EDIM = 3,        /* dimension mismatch */
  BC_ENONFINITE = 4,  /* NaN or infinity in input data */
  BC_ETIES = 5,       /* ties present or ranks not a permutation */
  BC_EPARSE = 6,      /* malformed CSV / config text */
  BC_EIO = 7,         /* file system failure */
  BC_EBANDWIDTH = 8,  /* jsv degree undefined for this model/point */
  BC_ECONFIG = 9,     /* invalid experiment configuration */
  BC_EINTERNAL = 10,
} bc_status;

/* Thread-local message for the most recent failure in this thread. */
const char* bc_last_error(void);

const char* bc_version(void);

/* ------------------------------------------------------------- samples -- */
typedef struct bc_sample bc_sample;

bc_status bc_sample_create(const double* data, size_t rows, size_t cols, bc_sample** out);
bc_status bc_sample_read_csv(const char* path, int has_header, bc_sample** out);
size_t bc_sample_rows(const bc_sample* s);
size_t bc_sample_cols(const bc_sample* s);
bc_status bc_sample_copy_values(const bc_sample* s, double* buf /* rows*cols */);
void bc_sample_free(bc_sample* s);

/* --------------------------------------------------------------- ranks -- */
typedef struct bc_ranks bc_ranks;

enum { BC_TIES_ERROR = 0, BC_TIES_RANDOM = 1 };

bc_status bc_ranks_compute(const bc_sample* s, int tie_policy, uint64_t tie_seed,
                           bc_ranks** out);
size_t bc_ranks_rows(const bc_ranks* r);
size_t bc_ranks_cols(const bc_ranks* r);
bc_status bc_ranks_copy_values(const bc_ranks* r, int* buf /* rows*cols */);
void bc_ranks_free(bc_ranks* r);

/* ---------------------------------------------------------- estimators -- */
typedef struct bc_estimator bc_estimator;

enum {
  BC_EST_EMPIRICAL = 0,
  BC_EST_CHECKERBOARD = 1,
  BC_EST_BETA = 2,
  BC_EST_BERNSTEIN = 3,
};

/* degrees (length cols) is required for BC_EST_BERNSTEIN, ignored otherwise
 * (pass NULL, 0). */
bc_status bc_estimator_create(const bc_ranks* r, int kind, const int* degrees,
                              size_t n_degrees, bc_estimator** out);
bc_status bc_estimator_eval(const bc_estimator* e, const double* u, size_t dim, double* out);
bc_status bc_sup_distance(const bc_estimator* f, const bc_estimator* g,
                          int grid_points_per_axis, double* out);
bc_status bc_genuine_degrees(uint64_t n, const int* degrees, size_t n_degrees, int* out_flag);
void bc_estimator_free(bc_estimator* e);

/* --------------------------------------------------- coefficient arrays -- */
typedef struct bc_coeffs bc_coeffs;

bc_status bc_coeffs_read_csv(const char* path, bc_coeffs** out);
bc_status bc_coeffs_write_csv(const bc_coeffs* a, const char* path);
/* Empirical-copula values on the degrees grid (the smoothed estimator's
 * coefficient array). */
bc_status bc_coeffs_from_ranks(const bc_ranks* r, const int* degrees, size_t n_degrees,
                               bc_coeffs** out);
bc_status bc_coeffs_eval(const bc_coeffs* a, const double* u, size_t dim, double* out);
/* Copula-validity conditions on the coefficients. Flags are written as
 * 0/1 into ok_grounded / ok_margins / ok_differences; a human-readable
 * report (witness list) is written into report_buf, NUL-terminated and
 * truncated to report_len. */
bc_status bc_coeffs_check(const bc_coeffs* a, int* ok_grounded, int* ok_margins,
                          int* ok_differences, char* report_buf, size_t report_len);
void bc_coeffs_free(bc_coeffs* a);

/* ------------------------------------------------------ beta sampling -- */
enum { BC_SCHEME_DIRECT = 0, BC_SCHEME_ORDERSTAT = 1 };

/* count rows of cols(r) uniforms, written row-major into out. */
bc_status bc_sampler_draw(const bc_ranks* r, int scheme, uint64_t seed, size_t count,
                          double* out);

/* ------------------------------------------------------- copula models -- */
typedef struct bc_model bc_model;

/* family: "indep", "fgm" (param = theta), "gauss" (param = rho),
 * "gumbel" (param = Kendall tau). */
bc_status bc_model_create(const char* family, double param, bc_model** out);
bc_status bc_model_cdf(const bc_model* m, const double* u, size_t dim, double* out);
/* out4 = { dC/du1, dC/du2, d2C/du1^2, d2C/du2^2 } */
bc_status bc_model_partials(const bc_model* m, double u1, double u2, double out4[4]);
bc_status bc_model_sample(const bc_model* m, size_t n, uint64_t seed, bc_sample** out);
bc_status bc_model_bernstein_transform(const bc_model* m, const int* degrees,
                                       size_t n_degrees, const double* u, size_t dim,
                                       double* out);
bc_status bc_model_jsv_degree(const bc_model* m, double u1, double u2, uint64_t n, int* out);
void bc_model_free(bc_model* m);

/* ---------------------------------------------------------- MC harness -- */
/* config_text is flat key=value lines ('#' comments):
 *   model=fgm            theta=-1      (rho= / tau= for other families)
 *   estimators=empirical,checkerboard,beta,bernstein=n/3,bernstein=jsv
 *   n=20:100:10          (or comma list)
 *   reps=20000
 *   seed=42
 *   cells=10             (optional; enables LRE heatmaps)
 *
 * bc_run_study writes one CSV per measure, optional LRE heatmaps, and a
 * manifest into out_dir. bc_run_lre writes a single heatmap CSV
 * (cell_j,cell_k,lre_percent) to out_path; the first two estimators are the
 * (numerator, denominator) pair. */
bc_status bc_run_study(const char* config_text, const char* out_dir);
bc_status bc_run_lre(const char* config_text, const char* out_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BETACOP_H */
