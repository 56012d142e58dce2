#pragma once

#include "model.hpp"

namespace dynsparse {

double expit(double x);

// E[z] of a Polya-Gamma PG(1, c) factor: tanh(c/2) / (2c), with the analytic
// limit 1/4 at c = 0. Strictly decreasing, range (0, 1/4].
double pg_mean(double c);

// Log-normal moments of sigma_t^2 = exp(h_t) under q(h_t) = N(mu, var).
struct SigmaMoments {
  double mean;      // E[sigma^2]
  double mean_inv;  // E[1/sigma^2]
};
SigmaMoments lognormal_sigma_moments(double mu, double var);

ModelState init_state(const Dataset& data, const Hyperparams& hp, bool heteroskedastic);

// Vector of partial residuals for predictor j, zero-padded at index 0:
// element t is y_t minus the fitted contribution of every other predictor.
VectorXd partial_residuals(const ModelState& state, const Dataset& data, int j);

// Coordinate update for q(b_j). The posterior precision is
// Diag(0, E[1/sigma_t^2] * gamma_prob_t * x_t^2) + E[1/eta_j^2] Q; note the
// inclusion probability enters linearly in the squared-design term, it is not
// squared itself. Writes b_mean and the band of Sigma_q(b_j).
void update_b(ModelState& state, const Dataset& data, int j, const TridiagPrecision& q,
              const VectorXd& resid);

// Bernoulli update for q(gamma_jt): returns the logit and stores both logit
// and probability in the state.
double update_gamma(ModelState& state, const Dataset& data, int j, int t,
                    const VectorXd& resid);

// Gaussian update for q(omega_j): precision Diag(0, E[z_j]) + E[1/xi_j^2] Q,
// natural parameter (0, gamma_prob - 1/2).
void update_omega(ModelState& state, int j, const TridiagPrecision& q);

// Polya-Gamma mean update for q(z_jt).
void update_z(ModelState& state, int j, int t);

// Shared inverse-gamma update for eta^2 / xi^2 / nu^2: the state block has
// n+1 entries so A_post = A + (n+1)/2, B_post = B + quad/2.
struct IgUpdate {
  double a_post;
  double b_post;
  double mean_inv;
};
IgUpdate update_variance_ig(double a_prior, double b_prior, double quad, int n);

// E_q[(y_t - beta_t' x_{t-1})^2] for one t (1-based), using the current b and
// gamma moments of every active predictor.
double expected_sq_residual(const ModelState& state, const Dataset& data, int t);

// Homoskedastic variance update: A_post = A_sigma + n/2,
// B_post = B_sigma + E_q[eps'eps]/2.
void update_sigma2_homo(ModelState& state, const Dataset& data, const Hyperparams& hp);

// Non-entropy objective for the Gaussian variational log-volatility block and
// its derivatives; exposed for the finite-difference checks.
double sv_objective(const VectorXd& h_mean, const VectorXd& h_var_diag,
                    const VectorXd& h_var_off, const VectorXd& eps2, double inv_nu2,
                    const TridiagPrecision& q);
VectorXd sv_gradient(const VectorXd& h_mean, const VectorXd& h_var_diag,
                     const VectorXd& eps2, double inv_nu2, const TridiagPrecision& q);
SymTridiag sv_neg_hessian(const VectorXd& h_mean, const VectorXd& h_var_diag,
                          const VectorXd& eps2, double inv_nu2, const TridiagPrecision& q);

// One damped Newton step on q(h): Sigma_new = (-hessian)^{-1}, then the mean
// step is halved (at most 20 times) until the objective stops decreasing.
// Refreshes the cached E[1/sigma_t^2].
void update_h(ModelState& state, const Dataset& data, const TridiagPrecision& q);

// Moments of beta_j = Gamma_j b_j under the mixture of Prop-style weights:
// mu = W_gamma * mu_b elementwise, and
// Sigma = (g g' + W) .* Sigma_b + W .* (mu_b mu_b') with
// g = (1, gamma_prob) and W = Diag(1, gamma_prob .* (1 - gamma_prob)).
struct BetaMoments {
  VectorXd mean;  // n+1
  MatrixXd cov;   // (n+1) x (n+1)
};
BetaMoments beta_moments(const VectorXd& b_mean, const MatrixXd& b_cov,
                         const VectorXd& gamma_prob);

// Marginal beta moments from the banded state (no dense covariance needed).
void beta_marginals(const PredictorQ& pq, VectorXd& mean, VectorXd& var);

// Rebuild the final posterior precision of b_j and return its dense inverse;
// used where the full Sigma_q(b) is required (dim capped at 512).
MatrixXd dense_b_cov(const ModelState& state, const Dataset& data, int j,
                     const TridiagPrecision& q, int max_dim = 512);

}  // namespace dynsparse
