#pragma once

#include <Eigen/Dense>
#include <random>

#include "errors.hpp"

namespace dynsparse {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Random-walk prior precision. For n observations the state vector has n+1
// entries (index 0 is the initial state), so the matrix is (n+1)x(n+1) with
//   diag = (1 + 1/k0, 2, ..., 2, 1),  offdiag = -1.
// SPD for every k0 in (0, inf).
struct TridiagPrecision {
  int n = 0;
  double k0 = 0.0;
  VectorXd diag;     // length n+1
  VectorXd offdiag;  // length n, constant -1

  int dim() const { return n + 1; }
};

TridiagPrecision build_precision(int n, double k0);

// Symmetric tridiagonal SPD matrix: the posterior precisions of this model
// are all of the form Diag(v) + c*Q, so bandwidth one covers every solve.
struct SymTridiag {
  VectorXd diag;
  VectorXd off;  // one shorter than diag

  int dim() const { return static_cast<int>(diag.size()); }

  static SymTridiag from_precision(const TridiagPrecision& q, double scale = 1.0);
  // Diag(d) + scale * Q, with d zero-padded implicitly when shorter than dim.
  static SymTridiag shifted(const TridiagPrecision& q, double scale, const VectorXd& d);
};

// Cholesky factor A = L L' with L lower bidiagonal. Throws numeric_error with
// the failing pivot index when A is not SPD.
class TridiagCholesky {
 public:
  explicit TridiagCholesky(const SymTridiag& a);

  int dim() const { return static_cast<int>(d_.size()); }

  VectorXd solve(const VectorXd& rhs) const;
  MatrixXd solve(const MatrixXd& rhs) const;

  // Tridiagonal band of A^{-1} via the Takahashi backward recursion; this is
  // all the CAVI sweeps ever need from the inverse.
  void inverse_band(VectorXd& inv_diag, VectorXd& inv_off) const;

  // Dense A^{-1}, for the full Sigma_q(b) covariance and the test oracles.
  // Guarded by a size cap since it is O(dim^2) memory.
  MatrixXd inverse_dense(int max_dim = 512) const;

  // Zero-mean draw from N(0, A^{-1}); callers add their own mean.
  VectorXd sample(std::mt19937_64& rng) const;

  double log_det() const;

 private:
  VectorXd d_;  // diagonal of L
  VectorXd e_;  // subdiagonal of L
};

// mu' Q mu + tr(Sigma Q) where only the tridiagonal band of Sigma enters
// (Q is tridiagonal). Feeds every inverse-gamma variance update.
double quad_form_expectation(const VectorXd& mu, const VectorXd& sigma_diag,
                             const VectorXd& sigma_off, const TridiagPrecision& q);

// Dense helpers (oracle-friendly, also used for the full Sigma_q(b)).
MatrixXd dense_from(const TridiagPrecision& q);
MatrixXd dense_from(const SymTridiag& a);

}  // namespace dynsparse
