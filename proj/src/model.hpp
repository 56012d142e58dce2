#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gmrf.hpp"

namespace dynsparse {

// Response y_t regressed on predictors observed one period earlier: row t of
// X holds x_{j,t-1}. Construction (lagging, transforms) happens in csv.cpp or
// in the simulation generators.
struct Dataset {
  VectorXd y;                      // length n
  MatrixXd X;                      // n x p
  std::vector<std::string> names;  // p labels
  std::vector<std::string> timestamps;  // optional, aligned with y

  int n() const { return static_cast<int>(y.size()); }
  int p() const { return static_cast<int>(X.cols()); }

  void validate() const {
    if (n() < 2) throw std::invalid_argument("dataset needs at least 2 observations");
    if (X.rows() != y.size()) throw std::invalid_argument("dataset: X/y row mismatch");
    if (p() < 1) throw std::invalid_argument("dataset needs at least one predictor");
    if (!y.allFinite() || !X.allFinite())
      throw std::invalid_argument("dataset contains missing or non-finite values");
  }
};

// Prior constants and algorithm knobs. Defaults follow the non-informative
// 0.01 convention for the variance priors, with (A_xi, B_xi) = (2, 5) so the
// latent inclusion process keeps a moderate amount of time dependence.
struct Hyperparams {
  double a_sigma = 0.01, b_sigma = 0.01;
  double a_eta = 0.01, b_eta = 0.01;
  double a_xi = 2.0, b_xi = 5.0;
  double a_nu = 0.01, b_nu = 0.01;
  double k0 = 100.0;
  double prune_eps = 0.01;
  double tol = 1e-4;
  int max_iter = 500;

  void validate() const {
    auto pos = [](double v) { return v > 0.0; };
    if (!(pos(a_sigma) && pos(b_sigma) && pos(a_eta) && pos(b_eta) && pos(a_xi) &&
          pos(b_xi) && pos(a_nu) && pos(b_nu) && pos(k0) && pos(tol)))
      throw std::invalid_argument("hyperparams must all be positive");
    if (!(prune_eps > 0.0 && prune_eps < 0.5))
      throw std::invalid_argument("prune_eps must lie in (0, 0.5)");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  }
};

// Inverse-gamma variational factor; mean_inv = A/B is E_q[1/x], floored away
// from zero so the GMRF precisions stay SPD.
struct InverseGammaQ {
  double a = 1.0;
  double b = 1.0;

  static constexpr double kFloor = 1e-12;
  double mean_inv() const { return std::max(a / b, kFloor); }
  // E[x] for A > 1, with the B/A fallback used by the forecast propagation.
  double mean() const { return a > 1.0 ? b / (a - 1.0) : b / a; }
};

// Variational state for one predictor. State vectors (b, omega) have n+1
// entries with index 0 the initial state; observation-indexed quantities
// (gamma, z) have n entries for t = 1..n.
struct PredictorQ {
  VectorXd b_mean;       // n+1
  VectorXd b_var_diag;   // n+1, diag of Sigma_q(b)
  VectorXd b_var_off;    // n, first off-diagonal of Sigma_q(b)
  VectorXd gamma_prob;   // n, in [0,1]
  VectorXd gamma_logit;  // n, the omega_{q(gamma_jt)} logits
  VectorXd omega_mean;   // n+1
  VectorXd omega_var_diag;  // n+1
  VectorXd omega_var_off;   // n
  VectorXd z_mean;          // n, Polya-Gamma means, > 0
  InverseGammaQ eta2;       // innovation variance of b
  InverseGammaQ xi2;        // innovation variance of omega
  bool active = true;
  int dropped_at = -1;  // sweep index when pruned, -1 while active
};

struct ModelState {
  int n = 0;
  std::vector<PredictorQ> pred;

  bool heteroskedastic = false;
  // Log-volatility block (heteroskedastic mode).
  VectorXd h_mean;      // n+1
  VectorXd h_var_diag;  // n+1
  VectorXd h_var_off;   // n
  InverseGammaQ nu2;
  // Homoskedastic mode.
  InverseGammaQ sigma2;

  // Cached E_q[1/sigma_t^2] for t = 1..n, refreshed after each volatility
  // update.
  VectorXd inv_sigma2;

  int p() const { return static_cast<int>(pred.size()); }
};

}  // namespace dynsparse
