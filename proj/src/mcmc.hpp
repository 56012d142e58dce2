#pragma once

#include <cstdint>
#include <vector>

#include "model.hpp"
#include "rng.hpp"

namespace dynsparse {

// Exact draw from PG(1, c) via the alternating-series accept/reject scheme
// (Devroye-style proposal: truncated inverse-Gaussian body, exponential tail).
double sample_pg1(double c, std::mt19937_64& rng);

// Posterior draws, stored post burn-in. State vectors b and omega carry the
// initial-state slot, gamma and z are per observation.
struct GibbsDraws {
  int n = 0, p = 0, ndraws = 0;
  std::vector<MatrixXd> b;      // per predictor: ndraws x (n+1)
  std::vector<MatrixXd> omega;  // per predictor: ndraws x (n+1)
  std::vector<MatrixXd> gamma;  // per predictor: ndraws x n, entries in {0,1}
  std::vector<MatrixXd> z;      // per predictor: ndraws x n
  MatrixXd eta2;                // ndraws x p
  MatrixXd xi2;                 // ndraws x p
  VectorXd sigma2;              // ndraws
};

// One full conditional pass, homoskedastic observation variance. The class
// exposes the individual blocks so the tests can pin single conditionals.
class GibbsSampler {
 public:
  GibbsSampler(const Dataset& data, const Hyperparams& hp, std::uint64_t seed);

  void sweep();

  void sample_b(int j);
  void sample_eta2(int j);
  void sample_omega(int j);
  void sample_xi2(int j);
  void sample_z(int j, int t);      // t is 1-based
  void sample_gamma(int j, int t);  // t is 1-based
  void sample_sigma2();

  // Current chain state (mutable so tests can pin blocks).
  std::vector<VectorXd> b;      // p x (n+1)
  std::vector<VectorXd> omega;  // p x (n+1)
  std::vector<VectorXd> gamma;  // p x n, 0/1
  std::vector<VectorXd> z;      // p x n
  VectorXd eta2, xi2;           // p
  double sigma2 = 1.0;

  std::mt19937_64& rng() { return rng_; }
  const TridiagPrecision& precision() const { return q_; }
  void refresh_residual_cache();

 private:
  VectorXd partial_resid(int j) const;  // length n+1, leading zero

  const Dataset* data_;
  Hyperparams hp_;
  TridiagPrecision q_;
  std::mt19937_64 rng_;
  VectorXd fitted_;  // length n
};

GibbsDraws run_gibbs(const Dataset& data, const Hyperparams& hp, int draws, int burnin,
                     std::uint64_t seed);

}  // namespace dynsparse
