#pragma once

#include <vector>

#include "cavi.hpp"
#include "model.hpp"

namespace dynsparse {

struct ForecastRecord {
  int origin = 0;       // last in-sample observation index (1-based)
  double y_true = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double log_score = 0.0;
};

double gaussian_log_score(double y, double mean, double variance);

// Moment-matched Gaussian predictive for the next period given a fitted
// state: the random-walk blocks propagate their terminal means, the
// h-step-ahead variance picks up h innovation variances.
struct Predictive {
  double mean;
  double variance;
};
Predictive predictive_density(const ModelState& state, const VectorXd& x_next,
                              int horizon = 1);

// Sum-of-squared-error difference, model minus benchmark (negative favours
// the model).
double rmsfe(const std::vector<double>& errors_model,
             const std::vector<double>& errors_bench);

// Sum-of-absolute-error difference.
double rmae(const std::vector<double>& errors_model,
            const std::vector<double>& errors_bench);

// Average log-score differential, model minus benchmark.
double als(const std::vector<double>& logscores_model,
           const std::vector<double>& logscores_bench);

enum class DmLoss { Squared, Absolute };

struct DmResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Diebold-Mariano test on the loss differentials with a Bartlett long-run
// variance truncated at horizon - 1 lags; two-sided normal p-value.
// Degenerate zero-variance differentials return (0, 1).
DmResult dm_test(const std::vector<double>& errors_a, const std::vector<double>& errors_b,
                 DmLoss loss, int horizon);

struct OosScheme {
  enum Kind { Rolling, Expanding } kind = Expanding;
  int window = 0;  // rolling width, or expanding burn-in
};
OosScheme parse_scheme(const std::string& text);  // "rolling:120" / "expanding:240"

// Fits fresh at every origin and records the h-step-ahead predictive against
// the realized value.
std::vector<ForecastRecord> run_oos(const Dataset& data, const Hyperparams& hp,
                                    const FitOptions& opts, const OosScheme& scheme,
                                    int horizon, int nthreads = 1);

// No-predictability reference: Gaussian with the recursive (or rolling) mean
// and variance of the response.
std::vector<ForecastRecord> run_oos_benchmark(const Dataset& data, const OosScheme& scheme,
                                              int horizon);

struct ForecastComparison {
  double rmsfe = 0.0;
  double rmae = 0.0;
  double als = 0.0;
  DmResult dm_squared;
  DmResult dm_absolute;
};
ForecastComparison compare_forecasts(const std::vector<ForecastRecord>& model,
                                     const std::vector<ForecastRecord>& bench,
                                     int horizon);

}  // namespace dynsparse
