#pragma once

#include <functional>
#include <vector>

#include "model.hpp"
#include "smoothing.hpp"
#include "vb.hpp"

namespace dynsparse {

struct FitOptions {
  bool smooth = false;
  bool heteroskedastic = false;
  bool prune = true;
  int spline_knots = 20;
  int spline_degree = 3;
};

struct DropEvent {
  int predictor;
  int iteration;
};

struct FitResult {
  ModelState state;
  int iterations = 0;
  bool converged = false;
  std::vector<DropEvent> dropped;
  std::vector<double> trace;  // per-sweep max |change| over (b_mean, gamma_prob)
};

// Called after each completed sweep (volatility updated, pruning not yet
// applied); used by diagnostics and tests.
using SweepObserver = std::function<void(const ModelState&, int iter)>;

// Full coordinate-ascent loop. Per sweep and per active predictor the order
// is: b, eta^2, omega, xi^2, then per t: z, gamma (or the smoothed gamma fit
// once all logits for the predictor are in). After the predictor loop the
// volatility block and, in the heteroskedastic case, nu^2 are refreshed.
// With prune enabled, predictors whose inclusion probabilities have collapsed
// are deactivated permanently once their omega covariance band has stopped
// shrinking.
FitResult fit(const Dataset& data, const Hyperparams& hp, const FitOptions& opts,
              const SweepObserver& observer = {});

// Deactivation test for one predictor: max_t gamma_prob < prune_eps and the
// stored Sigma_omega band did not decrease since the previous sweep.
bool prune_check(const PredictorQ& pq, const VectorXd& prev_omega_var_diag,
                 const VectorXd& prev_omega_var_off, double prune_eps);

// Collapsed-regime approximation of the gamma update (diagnostics only):
// expit{ mu_omega - 1/2 E[1/sigma_t^2] x^2 q_tt / E[1/eta^2] } with q_tt the
// t-th diagonal entry of Q^{-1}.
double approx_gamma_update(const ModelState& state, const Dataset& data, int j, int t,
                           const VectorXd& q_inv_diag);

// Diagonal of Q^{-1} (feeds approx_gamma_update).
VectorXd precision_inverse_diag(const TridiagPrecision& q);

}  // namespace dynsparse
