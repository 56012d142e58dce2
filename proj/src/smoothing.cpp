#include "smoothing.hpp"

#include <cmath>
#include <stdexcept>

#include "vb.hpp"

namespace dynsparse {

namespace {
double softplus(double x) {
  if (x > 30.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}
}  // namespace

VectorXd bspline_eval(const VectorXd& knots, int degree, int k, double x) {
  const int nk = static_cast<int>(knots.size());
  VectorXd b = VectorXd::Zero(nk - 1);
  // right endpoint belongs to the last interval
  double xe = std::min(std::max(x, knots(0)), knots(nk - 1));
  int last = nk - 2;
  while (last > 0 && knots(last) >= knots(nk - 1)) --last;
  for (int i = 0; i < nk - 1; ++i) {
    const bool in = (xe >= knots(i) && xe < knots(i + 1)) ||
                    (xe >= knots(nk - 1) && i == last);
    b(i) = in ? 1.0 : 0.0;
  }
  for (int d = 1; d <= degree; ++d) {
    for (int i = 0; i + d + 1 < nk; ++i) {
      double left = 0.0, right = 0.0;
      const double den_l = knots(i + d) - knots(i);
      const double den_r = knots(i + d + 1) - knots(i + 1);
      if (den_l > 0.0) left = (xe - knots(i)) / den_l * b(i);
      if (den_r > 0.0) right = (knots(i + d + 1) - xe) / den_r * b(i + 1);
      b(i) = left + right;
    }
  }
  return b.head(k);
}

SplineBasis bspline_basis(int n, int interior_knots, int degree) {
  if (degree < 0 || interior_knots < 1)
    throw std::invalid_argument("bspline_basis: need degree >= 0 and knots >= 1");
  if (n <= interior_knots + degree)
    throw std::invalid_argument("bspline_basis: n must exceed knots + degree");
  const int k = interior_knots + degree + 1;
  const int nk = k + degree + 1;
  SplineBasis basis;
  basis.degree = degree;
  basis.knots.resize(nk);
  const double a = 1.0, b = static_cast<double>(n);
  for (int i = 0; i <= degree; ++i) basis.knots(i) = a;
  for (int i = 1; i <= interior_knots; ++i)
    basis.knots(degree + i) = a + (b - a) * i / (interior_knots + 1);
  for (int i = 0; i <= degree; ++i) basis.knots(nk - 1 - i) = b;
  basis.W.resize(n, k);
  for (int t = 1; t <= n; ++t)
    basis.W.row(t - 1) = bspline_eval(basis.knots, degree, k, static_cast<double>(t));
  return basis;
}

double smooth_objective(const VectorXd& logits, const SplineBasis& basis,
                        const VectorXd& f) {
  double psi = 0.0;
  for (int t = 0; t < basis.n(); ++t) {
    const double u = basis.W.row(t).dot(f);
    psi += (logits(t) - u) * expit(u) + softplus(u);
  }
  return psi;
}

VectorXd smooth_gradient(const VectorXd& logits, const SplineBasis& basis,
                         const VectorXd& f) {
  VectorXd g = VectorXd::Zero(basis.k());
  for (int t = 0; t < basis.n(); ++t) {
    const double u = basis.W.row(t).dot(f);
    const double e = expit(u);
    g += basis.W.row(t).transpose() * ((logits(t) - u) * e * (1.0 - e));
  }
  return g;
}

SmoothFit fit_smooth_gamma(const VectorXd& logits, const SplineBasis& basis,
                           int max_steps, double grad_tol) {
  if (logits.size() != basis.n())
    throw std::invalid_argument("fit_smooth_gamma: logit length mismatch");
  if (!logits.allFinite())
    throw std::invalid_argument("fit_smooth_gamma: logits must be finite");

  SmoothFit fit;
  fit.coef = VectorXd::Zero(basis.k());
  double psi = smooth_objective(logits, basis, fit.coef);
  double alpha = 1.0;
  for (int step = 0; step < max_steps; ++step) {
    const VectorXd g = smooth_gradient(logits, basis, fit.coef);
    const double gnorm2 = g.squaredNorm();
    if (std::sqrt(gnorm2) < grad_tol) break;
    alpha = std::min(alpha * 2.0, 1e4);
    double cand_psi;
    VectorXd cand;
    int backtracks = 0;
    for (;;) {
      cand = fit.coef + alpha * g;
      cand_psi = smooth_objective(logits, basis, cand);
      if (cand_psi >= psi + 1e-4 * alpha * gnorm2 || backtracks++ > 60) break;
      alpha *= 0.5;
    }
    if (cand_psi <= psi && backtracks > 60) break;  // no admissible ascent step
    fit.coef = cand;
    psi = cand_psi;
    fit.steps = step + 1;
  }
  fit.objective = psi;
  fit.probs.resize(basis.n());
  for (int t = 0; t < basis.n(); ++t) fit.probs(t) = expit(basis.W.row(t).dot(fit.coef));
  return fit;
}

}  // namespace dynsparse
