/* ldcanon -- linkage disequilibrium measures for 2x2 haplotype tables.
 *
 * C interface to the shared library. All functions are thread-safe; objects
 * behind opaque handles are immutable after creation and may be shared
 * between threads. Probability tables are passed as double[4] in the order
 * p00, p01, p10, p11; count tables as uint32_t[4] in the same order.
 */
#ifndef LDCANON_H
#define LDCANON_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ldc_status {
    LDC_OK = 0,
    LDC_ERR_INVALID_ARGUMENT = 1,
    LDC_ERR_NON_POSITIVE_ENTRY = 2,
    LDC_ERR_NOT_NORMALIZED = 3,
    LDC_ERR_NON_POSITIVE_SCALE = 4,
    LDC_ERR_NON_POSITIVE_LAMBDA = 5,
    LDC_ERR_QUADRATURE_FAILURE = 6,
    LDC_ERR_INSUFFICIENT_SAMPLES = 7,
    LDC_ERR_BUDGET_EXCEEDED = 8,
    LDC_ERR_DEGENERATE_MARGINALS = 9,
    LDC_ERR_PARSE = 10,
    LDC_ERR_IO = 11,
    LDC_ERR_INTERNAL = 12
} ldc_status;

typedef enum ldc_measure {
    LDC_MEASURE_D = 0,
    LDC_MEASURE_DPRIME = 1,
    LDC_MEASURE_R = 2,
    LDC_MEASURE_LAMBDA = 3,
    LDC_MEASURE_Q = 4,
    LDC_MEASURE_MI = 5,
    LDC_MEASURE_ETA = 6
} ldc_measure;

typedef enum ldc_family {
    LDC_EST_NAIVE = 0,
    LDC_EST_SEMI_NAIVE = 1,
    LDC_EST_BAYES = 2,
    LDC_EST_VOLUME = 3
} ldc_family;

typedef enum ldc_calib_method {
    LDC_CALIB_ANALYTIC_1 = 0,
    LDC_CALIB_ANALYTIC_HALF = 1,
    LDC_CALIB_QUADRATURE = 2,
    LDC_CALIB_MONTE_CARLO = 3
} ldc_calib_method;

/* The eight dihedral symmetries of a 2x2 table. */
typedef enum ldc_symmetry {
    LDC_SYM_IDENTITY = 0,
    LDC_SYM_TRANSPOSE = 1,
    LDC_SYM_ROW_SWAP = 2,
    LDC_SYM_COL_SWAP = 3,
    LDC_SYM_BOTH_SWAP = 4,
    LDC_SYM_TRANSPOSE_ROW_SWAP = 5,
    LDC_SYM_TRANSPOSE_COL_SWAP = 6,
    LDC_SYM_TRANSPOSE_BOTH_SWAP = 7
} ldc_symmetry;

const char* ldc_version(void);
/* Static description of a status code. */
const char* ldc_status_message(ldc_status status);
/* Detail message for the most recent failure on the calling thread. */
const char* ldc_last_error(void);

/* ---- tables ---------------------------------------------------------- */

/* Normalize four positive values into a probability table. */
ldc_status ldc_prob_table_make(const double raw[4], double out[4]);
/* Row and column sums: out = { p0., p1., p.0, p.1 }. */
ldc_status ldc_marginals(const double table[4], double out[4]);
/* Rescale rows/columns by (mu, nu) and renormalize. */
ldc_status ldc_selection_act(const double table[4], double mu, double nu,
                             double out[4]);
ldc_status ldc_apply_symmetry(const double table[4], ldc_symmetry s,
                              double out[4]);
int ldc_symmetry_sign(ldc_symmetry s);
ldc_symmetry ldc_symmetry_compose(ldc_symmetry a, ldc_symmetry b);
ldc_status ldc_odds_ratio(const double table[4], double* out);
/* The table with all marginals 1/2 realizing a given odds ratio. */
ldc_status ldc_canonical_representative(double lambda, double out[4]);
/* Posterior-mean odds ratio (n00+a00)(n11+a11) / ((n01+a01)(n10+a10)). */
ldc_status ldc_count_odds_ratio(const uint32_t counts[4],
                                const double alpha[4], double* out);

/* ---- classical measures ---------------------------------------------- */

/* Evaluate a measure on a probability table. LDC_MEASURE_ETA requires a
 * calibration handle and is served by ldc_calibration_eta_table instead. */
ldc_status ldc_measure_prob(const double table[4], ldc_measure m,
                            double* value);

/* ---- special functions ------------------------------------------------ */

/* Real dilogarithm -int_0^x ln|1-y|/y dy, defined for all real x. */
double ldc_dilog(double x);
/* Canonical measure calibrated by the uniform Dirichlet (alpha = 1). */
double ldc_eta1(double lambda);
/* Canonical measure calibrated by Jeffreys' prior (alpha = 1/2). */
double ldc_eta_half(double lambda);
/* Density of the odds ratio under Dirichlet(alpha), by nested quadrature. */
ldc_status ldc_lambda_density(double lambda, const double alpha[4],
                              double abs_tol, double* out);
/* Closed form of the same density for alpha = 1. */
double ldc_lambda_density_uniform(double lambda);

/* ---- calibration ------------------------------------------------------ */

typedef struct ldc_calibration ldc_calibration;

/* Build a calibration of the odds-ratio CDF for symmetric concentration
 * alpha. quad_tol is used by LDC_CALIB_QUADRATURE; mc_samples and seed by
 * LDC_CALIB_MONTE_CARLO (mc_samples >= 10000). Analytic methods require
 * alpha = 1 or alpha = 1/2 respectively. */
ldc_status ldc_calibrate(double alpha, ldc_calib_method method,
                         double quad_tol, uint64_t mc_samples, uint64_t seed,
                         ldc_calibration** out);
ldc_status ldc_calibration_cdf(const ldc_calibration* cal, double lambda,
                               double* out);
ldc_status ldc_calibration_eta_lambda(const ldc_calibration* cal,
                                      double lambda, double* out);
ldc_status ldc_calibration_eta_table(const ldc_calibration* cal,
                                     const double table[4], double* out);
double ldc_calibration_alpha(const ldc_calibration* cal);
ldc_calib_method ldc_calibration_method(const ldc_calibration* cal);
ldc_status ldc_calibration_save(const ldc_calibration* cal, const char* path);
ldc_status ldc_calibration_load(const char* path, ldc_calibration** out);
/* Max |Q(lambda) - eta(lambda)| over a log-spaced grid. */
ldc_status ldc_q_eta_gap(const ldc_calibration* cal, double lambda_min,
                         double lambda_max, uint32_t grid_points, double* out);
void ldc_calibration_free(ldc_calibration* cal);

/* ---- estimators -------------------------------------------------------- */

typedef struct ldc_estimator_spec {
    ldc_family family;
    double alpha[4];        /* prior concentrations; ignored for NAIVE */
    uint64_t mc_samples;    /* BAYES; 0 selects the default of 20000 */
    uint64_t seed;          /* BAYES */
    uint32_t volume_budget; /* VOLUME; 0 selects the default cap of 500 */
} ldc_estimator_spec;

typedef struct ldc_estimate_result {
    double value;
    int defined;    /* 0 when the plug-in hits 0/0 (naive only) */
    int inflated;   /* boundary value caused by zero cells (naive only) */
    double std_error; /* Monte Carlo standard error (BAYES only) */
} ldc_estimate_result;

/* Estimate a measure from observed counts. For LDC_MEASURE_ETA, cal selects
 * the calibrating distribution (may be NULL for the VOLUME family, which
 * does not use a CDF). */
ldc_status ldc_estimate(const uint32_t counts[4], ldc_measure m,
                        const ldc_estimator_spec* spec,
                        const ldc_calibration* cal,
                        ldc_estimate_result* out);
/* Probability of an observed table under a Dirichlet-multinomial. */
ldc_status ldc_table_probability(const uint32_t counts[4],
                                 const double alpha[4], double* out);

/* ---- studies ----------------------------------------------------------- */

/* Run a simulation study ("mse", "kendall" or "distribution") described by
 * a key=value config, writing report files into out_dir. */
ldc_status ldc_study_run(const char* kind, const char* config_path,
                         const char* out_dir, int threads);
ldc_status ldc_study_run_text(const char* kind, const char* config_text,
                              const char* out_dir, int threads);

#ifdef __cplusplus
}
#endif

#endif /* LDCANON_H */
