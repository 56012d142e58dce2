/*
 * dynsparse — dynamic Bernoulli-Gaussian variable selection for
 * time-varying-parameter regressions.
 *
 * C interface of the shared library. All objects are opaque handles created
 * and destroyed through these functions; every fallible call returns a
 * dsp_status and leaves a human-readable message in dsp_last_error() (the
 * message is thread-local).
 */
#ifndef DYNSPARSE_H
#define DYNSPARSE_H

#include <stdint.h>

#if defined(_WIN32)
#define DSP_API __declspec(dllexport)
#else
#define DSP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dsp_status {
  DSP_OK = 0,
  DSP_ERR_INVALID = 1, /* bad argument or configuration */
  DSP_ERR_NUMERIC = 2, /* factorization or other numeric failure */
  DSP_ERR_IO = 3,      /* file parsing or writing failed */
  DSP_ERR_STATE = 4    /* object not in the required state (e.g. NULL handle) */
} dsp_status;

DSP_API const char* dsp_last_error(void);
DSP_API const char* dsp_version(void);

typedef struct dsp_dataset dsp_dataset;
typedef struct dsp_options dsp_options;
typedef struct dsp_fit dsp_fit;
typedef struct dsp_gibbs dsp_gibbs;
typedef struct dsp_forecasts dsp_forecasts;

/* -------- datasets -------- */

/* y has n entries; x is n*p row-major, row t holding the predictors already
 * lagged for y[t]. names may be NULL. */
DSP_API dsp_status dsp_dataset_create(int n, int p, const double* y, const double* x,
                                      const char* const* names, dsp_dataset** out);

/* CSV with a header row. Predictors are lagged `horizon` periods against the
 * target column; log_diff_transform turns a price level P into
 * (400/horizon) * ln(P_t / P_{t-1}). date_column may be NULL or empty. */
DSP_API dsp_status dsp_dataset_load_csv(const char* path, const char* target,
                                        const char* date_column, int horizon,
                                        int log_diff_transform, int standardize,
                                        dsp_dataset** out);

/* Simulation designs: patterns is a comma-separated list drawn from
 * always_on, one_switch, two_switch, short_lived, always_zero; one predictor
 * per entry. beta_true / gamma_true, when non-NULL, receive n*p row-major
 * truths. */
DSP_API dsp_status dsp_dataset_simulate(const char* patterns, int n, double noise_var,
                                        double x_autocorr, uint64_t seed,
                                        dsp_dataset** out, double* beta_true,
                                        double* gamma_true);

DSP_API void dsp_dataset_free(dsp_dataset* d);
DSP_API int dsp_dataset_rows(const dsp_dataset* d);
DSP_API int dsp_dataset_cols(const dsp_dataset* d);
DSP_API const char* dsp_dataset_name(const dsp_dataset* d, int j);

/* -------- options --------
 * Numeric key/value store. Keys: a_sigma, b_sigma, a_eta, b_eta, a_xi, b_xi,
 * a_nu, b_nu, k0, prune_eps, tol, max_iter, smooth, heteroskedastic, prune,
 * spline_knots, spline_degree, seed. Boolean flags take 0/1. */
DSP_API dsp_options* dsp_options_create(void);
DSP_API void dsp_options_free(dsp_options* o);
DSP_API dsp_status dsp_options_set(dsp_options* o, const char* key, double value);
DSP_API dsp_status dsp_options_get(const dsp_options* o, const char* key, double* value);

/* -------- variational fit -------- */

DSP_API dsp_status dsp_fit_run(const dsp_dataset* d, const dsp_options* o, dsp_fit** out);
DSP_API void dsp_fit_free(dsp_fit* f);
DSP_API int dsp_fit_iterations(const dsp_fit* f);
DSP_API int dsp_fit_converged(const dsp_fit* f);

/* out buffers are n*p row-major (coefficients, inclusion) or length n
 * (volatility = E[sigma_t]). dropped wants length p: -1 for active
 * predictors, otherwise the sweep at which the predictor was removed. */
DSP_API dsp_status dsp_fit_coefficients(const dsp_fit* f, double* out);
DSP_API dsp_status dsp_fit_inclusion(const dsp_fit* f, double* out);
DSP_API dsp_status dsp_fit_volatility(const dsp_fit* f, double* out);
DSP_API dsp_status dsp_fit_dropped(const dsp_fit* f, int* out);

DSP_API dsp_status dsp_fit_predict(const dsp_fit* f, const double* x_next, int horizon,
                                   double* mean, double* variance);

/* Writes coefficients.csv, inclusion.csv, volatility.csv and dropped.json
 * into out_dir (which must exist). */
DSP_API dsp_status dsp_fit_write_outputs(const dsp_fit* f, const char* out_dir);

/* -------- Gibbs sampler (homoskedastic) -------- */

DSP_API dsp_status dsp_gibbs_run(const dsp_dataset* d, const dsp_options* o, int draws,
                                 int burnin, uint64_t seed, dsp_gibbs** out);
DSP_API void dsp_gibbs_free(dsp_gibbs* g);
DSP_API int dsp_gibbs_ndraws(const dsp_gibbs* g);

/* what: b | omega | gamma | z | eta2 | xi2 | sigma2. predictor is ignored for
 * sigma2. One row per retained draw. */
DSP_API dsp_status dsp_gibbs_export_csv(const dsp_gibbs* g, const char* what,
                                        int predictor, const char* path);

/* Posterior-accuracy overlap (percent) between the variational marginal and
 * the MCMC draws; what: beta | b | gamma; t is 1-based. */
DSP_API dsp_status dsp_overlap(const dsp_fit* f, const dsp_gibbs* g, const char* what,
                               int predictor, int t, double* out_pct);

/* -------- out-of-sample evaluation -------- */

/* scheme: "expanding:<burnin>" or "rolling:<window>". */
DSP_API dsp_status dsp_forecast_run(const dsp_dataset* d, const dsp_options* o,
                                    const char* scheme, int horizon, int nthreads,
                                    dsp_forecasts** out);
DSP_API dsp_status dsp_forecast_benchmark(const dsp_dataset* d, const char* scheme,
                                          int horizon, dsp_forecasts** out);
DSP_API void dsp_forecasts_free(dsp_forecasts* f);
DSP_API int dsp_forecasts_count(const dsp_forecasts* f);
DSP_API dsp_status dsp_forecasts_record(const dsp_forecasts* f, int i, int* origin,
                                        double* y_true, double* mean, double* variance,
                                        double* log_score);
DSP_API dsp_status dsp_forecasts_compare(const dsp_forecasts* model,
                                         const dsp_forecasts* bench, int horizon,
                                         double* rmsfe, double* rmae, double* als,
                                         double* dm_sq_stat, double* dm_sq_p,
                                         double* dm_abs_stat, double* dm_abs_p);

/* -------- selection metrics -------- */

DSP_API dsp_status dsp_metric_f1(const double* gamma_hat, const double* gamma_true, int n,
                                 double threshold, double* out);
DSP_API dsp_status dsp_metric_accuracy(const double* gamma_hat, const double* gamma_true,
                                       int n, double threshold, double* out);
DSP_API dsp_status dsp_metric_mse(const double* beta_hat, const double* beta_true, int n,
                                  double* out);

#ifdef __cplusplus
}
#endif

#endif /* DYNSPARSE_H */
