/* C interface to the bifurcating Markov chain kernel estimation library.
 *
 * Every function returns BMC_OK (0) or a positive error code; on failure
 * bmc_last_error_message() describes the problem (per thread). Handles are
 * opaque and released with the matching *_free function. Pointers returned
 * through out-parameters stay valid until their owning handle is freed.
 */
#ifndef BMC_BMC_H
#define BMC_BMC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BMC_API __declspec(dllexport)
#else
#define BMC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum
{
  BMC_OK = 0,
  BMC_ERR_INVALID_ARGUMENT = 1,
  BMC_ERR_OUT_OF_RANGE = 2,
  BMC_ERR_IO = 3,
  BMC_ERR_RUNTIME = 4
};

enum
{
  BMC_POP_GEN = 0,
  BMC_POP_TREE = 1
};

enum
{
  BMC_INIT_DIRAC = 0,
  BMC_INIT_STATIONARY = 1
};

enum
{
  BMC_EST_MU = 0,
  BMC_EST_MU_TRI = 1,
  BMC_EST_P = 2
};

enum
{
  BMC_SELECT_FIXED = 0,
  BMC_SELECT_CV = 1,
  BMC_SELECT_ROT = 2
};

enum
{
  BMC_STAT_P = 0,
  BMC_STAT_MU_TRI = 1,
  BMC_STAT_MU_TRI_FLUCTUATION = 2
};

/* Test functions understood by the moment oracles. */
enum
{
  BMC_FN_ONE = 0,
  BMC_FN_IDENTITY = 1,
  BMC_FN_SQUARE = 2,
  BMC_FN_BUMP = 3
};

typedef struct bmc_tree bmc_tree;
typedef struct bmc_estimate bmc_estimate;
typedef struct bmc_cv_result bmc_cv_result;
typedef struct bmc_report bmc_report;
typedef struct bmc_oracle_table bmc_oracle_table;
typedef struct bmc_figure bmc_figure;

typedef struct
{
  double a0, a1, b0, b1, sigma, rho;
} bmc_bar_params;

typedef struct
{
  double h, h0, h1;
} bmc_bandwidths;

BMC_API const char* bmc_last_error_message(void);
BMC_API const char* bmc_version(void);

/* Threads: values <= 0 mean BMC_KERNEL_THREADS or the hardware count. */
BMC_API int bmc_resolve_threads(int requested);

/* ---- trees ---- */
BMC_API int bmc_simulate(const bmc_bar_params* params, int n, int init_kind, double x0,
                         uint64_t seed, int threads, bmc_tree** out);
/* `values` holds 2^(depth+2) - 1 heap-ordered node values. */
BMC_API int bmc_tree_from_values(int depth, const double* values, size_t count, bmc_tree** out);
BMC_API int bmc_tree_read_csv(const char* path, bmc_tree** out);
BMC_API int bmc_tree_write_csv(const bmc_tree* tree, const char* path);
BMC_API int bmc_tree_read_binary(const char* path, bmc_tree** out);
BMC_API int bmc_tree_write_binary(const bmc_tree* tree, const char* path);
BMC_API int bmc_tree_depth(const bmc_tree* tree, int* out);
BMC_API int bmc_tree_values(const bmc_tree* tree, const double** values, size_t* count);
BMC_API void bmc_tree_free(bmc_tree* tree);

/* ---- model densities ---- */
BMC_API int bmc_transition_density(const bmc_bar_params* params, double x, double y, double z,
                                   double* out);
BMC_API int bmc_stationary_mu(double a, double sigma, double x, double* out);
BMC_API int bmc_mu_triangle(double a, double sigma, double x, double x0, double x1, double* out);

/* ---- estimators ---- */
BMC_API int bmc_mu_hat(const bmc_tree* tree, int population, double h, double x, double* out);
BMC_API int bmc_mu_tri_hat(const bmc_tree* tree, int population, const bmc_bandwidths* bw,
                           double x, double x0, double x1, double* out);
BMC_API int bmc_p_hat(const bmc_tree* tree, int population, const bmc_bandwidths* numerator,
                      double h_denominator, double x, double x0, double x1, double* out);

typedef struct
{
  int kind;        /* BMC_EST_* */
  int population;  /* BMC_POP_* */
  bmc_bandwidths numerator;
  double denominator_h;
} bmc_estimator_spec;

/* `points` holds `count` (x, x0, x1) triples. */
BMC_API int bmc_estimate_grid(const bmc_tree* tree, const bmc_estimator_spec* spec,
                              const double* points, size_t count, int threads,
                              bmc_estimate** out);
BMC_API int bmc_estimate_values(const bmc_estimate* est, const double** values, size_t* count);
BMC_API int bmc_estimate_write(const bmc_estimate* est, const char* csv_path,
                               const char* json_path);
BMC_API void bmc_estimate_free(bmc_estimate* est);

/* ---- cross-validation ---- */
BMC_API int bmc_default_cv_grid(int n, int count, double* out);
/* grid_count == 0 selects the default 32-point grid. */
BMC_API int bmc_cv_select(const bmc_tree* tree, int folds, const double* grid, size_t grid_count,
                          uint64_t seed, int threads, bmc_cv_result** out);
BMC_API int bmc_cv_result_bandwidths(const bmc_cv_result* r, double* h_D, double* h_N);
BMC_API int bmc_cv_result_scores(const bmc_cv_result* r, const double** grid,
                                 const double** den, const double** num, size_t* count);
BMC_API void bmc_cv_result_free(bmc_cv_result* r);

/* Fold score of one fold k for one bandwidth h under the seeded partition. */
BMC_API int bmc_cv_fold_score(const bmc_tree* tree, int folds, uint64_t seed, int k, double h,
                              double* den, double* num);

/* ---- rule of thumb ---- */
typedef struct
{
  double h_D, h_N, h_0N, h_1N;
  double a_hat;
  double sigma_hats[3];
  int n, m;
} bmc_rot_selection;

/* m <= 0 selects the default lag floor(n/2) + 1. */
BMC_API int bmc_rot_select(const bmc_tree* tree, int m, bmc_rot_selection* out);
BMC_API int bmc_a_hat(const bmc_tree* tree, int m, double* out);

typedef struct
{
  double sigma_a, c1, c2, C, M, c_tri, c0_tri, c1_tri, c2_tri, C_tri, M_tri;
  double b[5];
  double ratio_lhs[5], ratio_rhs[5];
} bmc_rot_constants;

BMC_API int bmc_rot_constants_compute(double a, double sigma, bmc_rot_constants* out);
BMC_API int bmc_optimal_h_den(double a, double sigma, int n, double* out);
BMC_API int bmc_optimal_h_num(double a, double sigma, int n, bmc_bandwidths* out);

/* ---- oracle ---- */
BMC_API int bmc_true_variance_clt(double a, double sigma, double x, double x0, double x1,
                                  int statistic, int population, double* out);
BMC_API int bmc_expected_generation_sum(const bmc_bar_params* params, int fn, double x, int n,
                                        double* out);
BMC_API int bmc_second_moment_generation_sum(const bmc_bar_params* params, int fn, double x,
                                             int n, double* out);
BMC_API int bmc_mixed_moment(const bmc_bar_params* params, int f, int g, double x, int n, int m,
                             double* out);

typedef struct
{
  double a, sigma, x;
  int max_depth;
  size_t trees;
  uint64_t seed;
  double z_limit;
} bmc_oracle_check_spec;

typedef struct
{
  const char* formula;
  const char* function;
  int n, m;
  double quadrature, mc_estimate, standard_error, z;
  int pass;
} bmc_oracle_row;

BMC_API void bmc_oracle_check_spec_default(bmc_oracle_check_spec* spec);
BMC_API int bmc_oracle_check(const bmc_oracle_check_spec* spec, int threads,
                             bmc_oracle_table** out);
BMC_API int bmc_oracle_table_count(const bmc_oracle_table* t, size_t* count);
BMC_API int bmc_oracle_table_row(const bmc_oracle_table* t, size_t i, bmc_oracle_row* row);
BMC_API int bmc_oracle_table_csv(const bmc_oracle_table* t, const char** csv);
BMC_API void bmc_oracle_table_free(bmc_oracle_table* t);

/* ---- CLT harness ---- */
typedef struct
{
  bmc_bar_params model;
  const int* n_list;
  size_t n_count;
  size_t replications;
  double point[3];
  int population;
  int selector;  /* BMC_SELECT_* */
  double gamma;
  int folds;
  const double* cv_grid;  /* may be NULL: default grid per depth */
  size_t cv_grid_count;
  uint64_t seed;
} bmc_experiment_spec;

typedef struct
{
  int n;
  size_t count;
  double truth, sigma2, mean, variance, skewness, excess_kurtosis, ks_distance,
    median_abs_error;
} bmc_summary;

typedef struct
{
  uint64_t seed;
  size_t replication;
  int n;
  double h_used, h_product, h_denominator, estimate, standardized;
} bmc_report_row;

/* Fills defaults; n_list is left NULL (meaning depth 12). */
BMC_API void bmc_experiment_spec_default(bmc_experiment_spec* spec);
BMC_API int bmc_run_clt(const bmc_experiment_spec* spec, int statistic, int threads,
                        bmc_report** out);
BMC_API int bmc_report_row_count(const bmc_report* r, size_t* count);
BMC_API int bmc_report_row_at(const bmc_report* r, size_t i, bmc_report_row* row);
BMC_API int bmc_report_summary_count(const bmc_report* r, size_t* count);
BMC_API int bmc_report_summary(const bmc_report* r, size_t i, bmc_summary* out);
BMC_API int bmc_report_write_csv(const bmc_report* r, const char* path);
BMC_API int bmc_report_write_json(const bmc_report* r, const char* path);
BMC_API int bmc_report_json(const bmc_report* r, const char** json);
BMC_API void bmc_report_free(bmc_report* r);

/* ---- figure reproduction ---- */
typedef struct
{
  int figure_case;  /* 1 or 2 */
  int selector;     /* BMC_SELECT_CV or BMC_SELECT_ROT */
  const int* n_list;
  size_t n_count;
  size_t seeds;
  uint64_t seed;
  double x, lo, hi;
  int grid_points;
  int folds;
  const double* cv_grid;
  size_t cv_grid_count;
  double root;
} bmc_figure_spec;

typedef struct
{
  int n;
  uint64_t seed;
  bmc_bandwidths numerator;
  double h_denominator;
  double sup_error;
  size_t point_count;
  const double* points;  /* point_count (x, x0, x1) triples */
  const double* estimate;
  const double* truth;
} bmc_figure_slice;

/* Fills defaults; n_list is left NULL (meaning 10, 12, 14). */
BMC_API void bmc_figure_spec_default(bmc_figure_spec* spec);
BMC_API int bmc_run_figures(const bmc_figure_spec* spec, int threads, bmc_figure** out);
BMC_API int bmc_figure_mean_sup_error(const bmc_figure* f, const double** values, size_t* count);
BMC_API int bmc_figure_slice_count(const bmc_figure* f, size_t* count);
BMC_API int bmc_figure_slice_at(const bmc_figure* f, size_t i, bmc_figure_slice* out);
/* Writes <prefix>_n<k>.csv, <prefix>_summary.json and optionally gnuplot scripts. */
BMC_API int bmc_figure_write(const bmc_figure* f, const char* prefix, int gnuplot);
BMC_API void bmc_figure_free(bmc_figure* f);

#ifdef __cplusplus
}
#endif

#endif
