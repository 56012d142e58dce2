#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "model.hpp"

namespace dynsparse {

enum class PatternKind { AlwaysOn, OneSwitch, TwoSwitch, ShortLived, AlwaysZero };

const char* pattern_name(PatternKind kind);
std::optional<PatternKind> pattern_from_name(const std::string& name);

// One simulated coefficient trajectory: beta is zero exactly where the
// inclusion indicator is zero.
struct CoefPattern {
  PatternKind kind = PatternKind::AlwaysZero;
  VectorXd beta;        // length n
  VectorXd gamma_true;  // length n, entries in {0,1}
};

// AR(1) coefficient path with stationary start, always included.
CoefPattern gen_always_on(int n, std::mt19937_64& rng, double rho = 0.98,
                          double var = 0.1);

// Alternating off/on segments with Poisson(n/expected_segments) lengths; the
// starting regime is a fair coin and active stretches carry fresh AR(1) paths.
CoefPattern gen_switching(int n, int expected_segments, std::mt19937_64& rng,
                          double rho = 0.98, double var = 0.1);

// One Poisson(n/10)-length active window placed uniformly at random.
CoefPattern gen_short_lived(int n, std::mt19937_64& rng, double rho = 0.98,
                            double var = 0.1);

CoefPattern gen_always_zero(int n);

CoefPattern gen_pattern(PatternKind kind, int n, std::mt19937_64& rng);

struct SimTruth {
  MatrixXd beta;        // n x p
  MatrixXd gamma_true;  // n x p
};

struct GenOptions {
  double noise_var = 0.25;
  double x_autocorr = 0.0;                 // AR(1)-in-time predictors when nonzero
  std::optional<MatrixXd> cross_corr;      // p x p correlation of the x panel
};

// y_t = sum_j beta_jt x_{j,t-1} + eps; predictors standard normal unless the
// correlation knobs say otherwise.
std::pair<Dataset, SimTruth> gen_dataset(const std::vector<CoefPattern>& patterns,
                                         std::mt19937_64& rng,
                                         const GenOptions& opts = {});

// F1 after thresholding the inclusion-probability path. Degenerate case with
// neither true nor predicted positives counts as a perfect score.
double f1_score(const VectorXd& gamma_hat, const VectorXd& gamma_true,
                double threshold = 0.5);

// Share of correctly classified periods; the reported metric for patterns
// with no positives.
double classification_accuracy(const VectorXd& gamma_hat, const VectorXd& gamma_true,
                               double threshold = 0.5);

double mse_path(const VectorXd& beta_hat, const VectorXd& beta_true);

// 100 * (1 - 0.5 * L1) between two densities tabulated on the same grid,
// plus an optional pair of point masses at zero. Symmetric in its two
// density arguments.
double overlap_from_grids(const VectorXd& grid, const VectorXd& f, const VectorXd& g,
                          double atom_f = 0.0, double atom_g = 0.0);

// Convenience grid covering both an analytic Gaussian and a sample cloud.
VectorXd overlap_grid(double mu, double sd, const VectorXd& samples, int points = 801);

// Freedman-Diaconis histogram evaluated as a density on `grid`; `weight`
// rescales the total mass (used for the continuous part of a mixture).
VectorXd histogram_density(const VectorXd& samples, const VectorXd& grid, double weight);

// Gaussian variational marginal vs MCMC samples (used for b_jt).
double overlap_gaussian(double mu, double var, const VectorXd& samples);

// Two-component marginal of beta_jt: point mass (1 - w) at zero plus
// w * N(mu, var), against MCMC draws of gamma * b (exact zeros form the
// sampled atom).
double overlap_beta_mixture(double w, double mu, double var, const VectorXd& samples);

// Bernoulli vs binary draws (used for gamma_jt).
double overlap_bernoulli(double prob, const VectorXd& samples01);

}  // namespace dynsparse
