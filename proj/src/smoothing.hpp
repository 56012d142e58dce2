#pragma once

#include <Eigen/Dense>

namespace dynsparse {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// B-spline design matrix evaluated at t = 1..n. Clamped, equally spaced
// interior knots on [1, n]; k = interior_knots + degree + 1 columns; rows sum
// to one.
struct SplineBasis {
  MatrixXd W;      // n x k
  VectorXd knots;  // full (clamped) knot vector
  int degree = 3;

  int n() const { return static_cast<int>(W.rows()); }
  int k() const { return static_cast<int>(W.cols()); }
};

SplineBasis bspline_basis(int n, int interior_knots, int degree);

// Cox-de Boor evaluation of all k basis functions at x for a clamped knot
// vector; exposed so tests can cross-check rows of W.
VectorXd bspline_eval(const VectorXd& knots, int degree, int k, double x);

struct SmoothFit {
  VectorXd coef;   // k
  VectorXd probs;  // n, expit(W f)
  double objective = 0.0;
  int steps = 0;
};

// Projects the per-period inclusion logits onto the spline space by
// maximizing
//   psi(f) = sum_t [ (logit_t - w_t'f) expit(w_t'f) + log(1 + exp(w_t'f)) ]
// via gradient ascent with backtracking (init f = 0, at most `max_steps`
// steps, stop when ||grad|| < grad_tol).
SmoothFit fit_smooth_gamma(const VectorXd& logits, const SplineBasis& basis,
                           int max_steps = 1000, double grad_tol = 1e-8);

double smooth_objective(const VectorXd& logits, const SplineBasis& basis,
                        const VectorXd& f);
VectorXd smooth_gradient(const VectorXd& logits, const SplineBasis& basis,
                         const VectorXd& f);

}  // namespace dynsparse
