#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "rng.hpp"
#include "smoothing.hpp"
#include "vb.hpp"

using namespace dynsparse;
using Eigen::VectorXd;

namespace {

// Straightforward Cox-de Boor re-implementation used as the evaluation oracle.
double cox_de_boor(const VectorXd& knots, int i, int d, double x) {
  if (d == 0) {
    const int nk = static_cast<int>(knots.size());
    if (x >= knots(nk - 1))  // right-closed last interval
      return (knots(i + 1) >= knots(nk - 1) && knots(i) < knots(i + 1)) ? 1.0 : 0.0;
    return (x >= knots(i) && x < knots(i + 1)) ? 1.0 : 0.0;
  }
  double acc = 0.0;
  const double dl = knots(i + d) - knots(i);
  const double dr = knots(i + d + 1) - knots(i + 1);
  if (dl > 0.0) acc += (x - knots(i)) / dl * cox_de_boor(knots, i, d - 1, x);
  if (dr > 0.0) acc += (knots(i + d + 1) - x) / dr * cox_de_boor(knots, i + 1, d - 1, x);
  return acc;
}

int sign_changes(const VectorXd& probs) {
  int changes = 0;
  for (int i = 1; i < probs.size(); ++i)
    if ((probs(i) - 0.5) * (probs(i - 1) - 0.5) < 0.0) ++changes;
  return changes;
}

}  // namespace

TEST_CASE("degree-zero basis gives indicator columns") {
  const SplineBasis basis = bspline_basis(10, 1, 0);
  CHECK(basis.k() == 2);
  for (int t = 0; t < 10; ++t) {
    CHECK(basis.W.row(t).sum() == doctest::Approx(1.0));
    CHECK(((basis.W(t, 0) == 1.0) != (basis.W(t, 1) == 1.0)));
  }
  // the split sits midway through [1, 10]
  CHECK(basis.W(0, 0) == 1.0);
  CHECK(basis.W(9, 1) == 1.0);
}

TEST_CASE("cubic basis rows sum to one at the figure's size") {
  const SplineBasis basis = bspline_basis(200, 20, 3);
  CHECK(basis.k() == 24);
  for (int t = 0; t < 200; ++t) CHECK(basis.W.row(t).sum() == doctest::Approx(1.0));
  CHECK(basis.W.minCoeff() >= 0.0);
}

TEST_CASE("basis values match the textbook recursion at knot midpoints") {
  const SplineBasis basis = bspline_basis(40, 5, 3);
  for (int seg = 0; seg + 1 < basis.knots.size(); ++seg) {
    const double lo = basis.knots(seg), hi = basis.knots(seg + 1);
    if (!(hi > lo)) continue;
    const double mid = 0.5 * (lo + hi);
    const VectorXd got = bspline_eval(basis.knots, 3, basis.k(), mid);
    for (int i = 0; i < basis.k(); ++i)
      CHECK(got(i) == doctest::Approx(cox_de_boor(basis.knots, i, 3, mid)).epsilon(1e-12));
  }
}

TEST_CASE("infeasible dimensions are rejected") {
  CHECK_THROWS_AS(bspline_basis(10, 9, 3), std::invalid_argument);
  CHECK_THROWS_AS(bspline_basis(5, 0, 3), std::invalid_argument);
}

TEST_CASE("constant logits are fitted exactly") {
  const SplineBasis basis = bspline_basis(60, 6, 3);
  const double c = 1.3;
  const SmoothFit fit = fit_smooth_gamma(VectorXd::Constant(60, c), basis);
  for (int t = 0; t < 60; ++t)
    CHECK(basis.W.row(t).dot(fit.coef) == doctest::Approx(c).epsilon(1e-5));
  for (int t = 0; t < 60; ++t) CHECK(fit.probs(t) == doctest::Approx(expit(c)).epsilon(1e-5));
}

TEST_CASE("smoothing gradient matches finite differences") {
  const SplineBasis basis = bspline_basis(30, 4, 3);
  std::mt19937_64 rng = make_rng(51, "smooth-fd");
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd logits(30), f(basis.k());
  for (int i = 0; i < 30; ++i) logits(i) = 2.0 * gauss(rng);
  for (int i = 0; i < basis.k(); ++i) f(i) = gauss(rng);
  const auto obj = [&](const VectorXd& v) { return smooth_objective(logits, basis, v); };
  const VectorXd want = oracle::fd_gradient(obj, f);
  const VectorXd got = smooth_gradient(logits, basis, f);
  for (int i = 0; i < basis.k(); ++i)
    CHECK(got(i) == doctest::Approx(want(i)).epsilon(1e-6));
}

TEST_CASE("erratic logits come out smoother than the raw path") {
  const int n = 80;
  std::mt19937_64 rng = make_rng(52, "smooth-erratic");
  std::bernoulli_distribution coin(0.5);
  VectorXd logits(n);
  for (int i = 0; i < n; ++i) logits(i) = coin(rng) ? 5.0 : -5.0;
  const SplineBasis basis = bspline_basis(n, 8, 3);
  const SmoothFit fit = fit_smooth_gamma(logits, basis);
  VectorXd raw(n);
  for (int i = 0; i < n; ++i) raw(i) = expit(logits(i));
  CHECK(sign_changes(fit.probs) < sign_changes(raw));
}

TEST_CASE("smoothing fit invariants") {
  const int n = 50;
  std::mt19937_64 rng = make_rng(53, "smooth-invariants");
  std::normal_distribution<double> gauss(0.0, 2.0);
  VectorXd logits(n);
  for (int i = 0; i < n; ++i) logits(i) = gauss(rng);
  const SplineBasis basis = bspline_basis(n, 6, 3);
  const SmoothFit fit = fit_smooth_gamma(logits, basis);

  CHECK(fit.objective >= smooth_objective(logits, basis, VectorXd::Zero(basis.k())));
  CHECK(fit.probs.minCoeff() > 0.0);
  CHECK(fit.probs.maxCoeff() < 1.0);

  SUBCASE("first-order stationarity: one more tiny ascent step changes nothing") {
    const VectorXd g = smooth_gradient(logits, basis, fit.coef);
    const double after = smooth_objective(logits, basis, fit.coef + 1e-4 * g);
    CHECK(std::abs(after - fit.objective) < 1e-8);
  }
  SUBCASE("determinism") {
    const SmoothFit again = fit_smooth_gamma(logits, basis);
    CHECK((again.probs - fit.probs).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("non-finite logits are rejected") {
    VectorXd bad = logits;
    bad(3) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(fit_smooth_gamma(bad, basis), std::invalid_argument);
  }
}
