#include "doctest.h"

#include <limits>

#include "cavi.hpp"
#include "oracles.hpp"
#include "rng.hpp"
#include "simlab.hpp"

using namespace dynsparse;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Dataset constant_signal_data(int n, double beta, std::uint64_t seed) {
  std::mt19937_64 rng = make_rng(seed, "cavi-data");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Dataset d;
  d.y.resize(n);
  d.X.resize(n, 1);
  for (int i = 0; i < n; ++i) {
    d.X(i, 0) = gauss(rng);
    d.y(i) = beta * d.X(i, 0) + 0.3 * gauss(rng);
  }
  d.names = {"signal"};
  return d;
}

Dataset signal_plus_noise_data(int n, std::uint64_t seed) {
  std::mt19937_64 rng = make_rng(seed, "cavi-noise-data");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Dataset d;
  d.y.resize(n);
  d.X.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    d.X(i, 0) = gauss(rng);
    d.X(i, 1) = gauss(rng);  // pure noise predictor
    d.y(i) = 1.0 * d.X(i, 0) + 0.5 * gauss(rng);
  }
  d.names = {"signal", "noise"};
  return d;
}

}  // namespace

TEST_CASE("fit recovers a constant coefficient") {
  const Dataset d = constant_signal_data(120, 1.0, 41);
  Hyperparams hp;
  FitOptions opts;
  opts.prune = false;
  const FitResult fr = fit(d, hp, opts);
  CHECK(fr.converged);
  CHECK(fr.state.pred[0].gamma_prob.minCoeff() > 0.9);
  VectorXd mean, var;
  beta_marginals(fr.state.pred[0], mean, var);
  for (int t = 1; t <= d.n(); ++t) CHECK(mean(t) == doctest::Approx(1.0).epsilon(0.35));
}

TEST_CASE("noise predictor collapses and is pruned") {
  const Dataset d = signal_plus_noise_data(150, 42);
  Hyperparams hp;

  FitOptions keep;
  keep.prune = false;
  const FitResult plain = fit(d, hp, keep);
  CHECK(plain.state.pred[1].gamma_prob.maxCoeff() < 0.05);
  CHECK(plain.state.pred[0].gamma_prob.minCoeff() > 0.9);

  FitOptions pruning;
  pruning.prune = true;
  const FitResult pruned = fit(d, hp, pruning);
  REQUIRE(pruned.dropped.size() == 1);
  CHECK(pruned.dropped[0].predictor == 1);
  CHECK_FALSE(pruned.state.pred[1].active);
  CHECK(pruned.state.pred[1].dropped_at == pruned.dropped[0].iteration);
  CHECK(pruned.state.pred[1].gamma_prob.maxCoeff() == 0.0);
  CHECK(pruned.state.pred[1].b_mean.cwiseAbs().maxCoeff() == 0.0);

  SUBCASE("retained coefficients match the unpruned fit") {
    VectorXd m0, v0, m1, v1;
    beta_marginals(plain.state.pred[0], m0, v0);
    beta_marginals(pruned.state.pred[0], m1, v1);
    CHECK((m0 - m1).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("infinite tolerance stops after one sweep, unconverged") {
  const Dataset d = constant_signal_data(30, 0.5, 43);
  Hyperparams hp;
  hp.tol = std::numeric_limits<double>::infinity();
  FitOptions opts;
  const FitResult fr = fit(d, hp, opts);
  CHECK(fr.iterations == 1);
  CHECK_FALSE(fr.converged);
}

TEST_CASE("fit is deterministic") {
  const Dataset d = signal_plus_noise_data(60, 44);
  Hyperparams hp;
  FitOptions opts;
  const FitResult a = fit(d, hp, opts);
  const FitResult b = fit(d, hp, opts);
  CHECK(a.iterations == b.iterations);
  for (int j = 0; j < d.p(); ++j) {
    CHECK((a.state.pred[j].b_mean - b.state.pred[j].b_mean).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.state.pred[j].gamma_prob - b.state.pred[j].gamma_prob).cwiseAbs().maxCoeff() ==
          0.0);
  }
}

TEST_CASE("initialization starts inclusion probabilities at one half") {
  const Dataset d = constant_signal_data(20, 1.0, 45);
  Hyperparams hp;
  const ModelState st = init_state(d, hp, false);
  CHECK(st.pred[0].gamma_prob.minCoeff() == 0.5);
  CHECK(st.pred[0].gamma_prob.maxCoeff() == 0.5);
  CHECK(st.pred[0].b_mean.cwiseAbs().maxCoeff() == 0.0);
  CHECK(st.pred[0].omega_mean.cwiseAbs().maxCoeff() == 0.0);
  CHECK(st.pred[0].z_mean.minCoeff() == 0.25);
  CHECK(st.pred[0].z_mean.maxCoeff() == 0.25);
}

TEST_CASE("prune_check") {
  const Dataset d = constant_signal_data(10, 0.0, 46);
  Hyperparams hp;  // prune_eps = 0.01
  ModelState st = init_state(d, hp, false);
  PredictorQ& pq = st.pred[0];
  const VectorXd grown_diag = pq.omega_var_diag.array() - 1e-3;  // previous was smaller
  const VectorXd grown_off = pq.omega_var_off.array() - 1e-4;

  SUBCASE("half probabilities never pass") {
    pq.gamma_prob.setConstant(0.5);
    CHECK_FALSE(prune_check(pq, grown_diag, grown_off, hp.prune_eps));
  }
  SUBCASE("collapsed probabilities with grown covariance pass") {
    pq.gamma_prob.setConstant(0.001);
    CHECK(prune_check(pq, grown_diag, grown_off, hp.prune_eps));
  }
  SUBCASE("probability above the threshold fails") {
    pq.gamma_prob.setConstant(0.001);
    pq.gamma_prob(3) = 0.02;
    CHECK_FALSE(prune_check(pq, grown_diag, grown_off, hp.prune_eps));
  }
  SUBCASE("shrinking covariance band fails") {
    pq.gamma_prob.setConstant(0.001);
    VectorXd shrunk = pq.omega_var_diag.array() + 1e-3;  // previous was larger
    CHECK_FALSE(prune_check(pq, shrunk, grown_off, hp.prune_eps));
  }
}

TEST_CASE("collapsed-regime gamma approximation") {
  Hyperparams hp;
  const int n = 12;
  const Dataset d = constant_signal_data(n, 0.0, 47);
  const TridiagPrecision q = build_precision(n, hp.k0);
  const VectorXd q_inv_diag = precision_inverse_diag(q);

  SUBCASE("exact at gamma identically zero") {
    ModelState st = init_state(d, hp, false);
    st.pred[0].gamma_prob.setZero();
    const VectorXd resid = partial_residuals(st, d, 0);
    update_b(st, d, 0, q, resid);
    for (int t = 1; t <= n; ++t) {
      const double full = expit(update_gamma(st, d, 0, t, resid));
      const double approx = approx_gamma_update(st, d, 0, t, q_inv_diag);
      CHECK(approx == doctest::Approx(full).epsilon(1e-12));
    }
  }
  SUBCASE("O(eps) agreement for a collapsed state") {
    const double eps = 1e-4;
    ModelState st = init_state(d, hp, false);
    std::mt19937_64 rng = make_rng(48, "approx-gamma");
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    for (int i = 0; i < n; ++i) st.pred[0].gamma_prob(i) = eps * unif(rng);
    const VectorXd resid = partial_residuals(st, d, 0);
    update_b(st, d, 0, q, resid);
    update_omega(st, 0, q);
    for (int t = 1; t <= n; ++t) {
      const double full = expit(update_gamma(st, d, 0, t, resid));
      const double approx = approx_gamma_update(st, d, 0, t, q_inv_diag);
      CHECK(std::abs(approx - full) <= 10.0 * eps);
    }
  }
  SUBCASE("no agreement is claimed away from the collapsed regime") {
    ModelState st = init_state(d, hp, false);
    st.pred[0].gamma_prob.setConstant(0.4);
    const VectorXd resid = partial_residuals(st, d, 0);
    update_b(st, d, 0, q, resid);
    for (int t = 1; t <= n; ++t) {
      const double approx = approx_gamma_update(st, d, 0, t, q_inv_diag);
      CHECK(approx >= 0.0);
      CHECK(approx <= 1.0);
    }
  }
}

TEST_CASE("omega means decay monotonically once the prune conditions hold") {
  const Dataset d = signal_plus_noise_data(80, 49);
  Hyperparams hp;
  FitOptions opts;
  opts.prune = false;  // keep updating the collapsed predictor

  struct Snapshot {
    VectorXd omega;
    VectorXd var_diag;
    VectorXd var_off;
    double max_gamma;
  };
  std::vector<Snapshot> trail;
  const FitResult fr = fit(d, hp, opts, [&](const ModelState& st, int) {
    trail.push_back({st.pred[1].omega_mean, st.pred[1].omega_var_diag,
                     st.pred[1].omega_var_off, st.pred[1].gamma_prob.maxCoeff()});
  });
  REQUIRE(trail.size() >= 3);

  int first_hold = -1;
  for (size_t i = 1; i < trail.size(); ++i) {
    const bool small = trail[i].max_gamma < hp.prune_eps;
    const bool grown = (trail[i].var_diag - trail[i - 1].var_diag).minCoeff() >= 0.0 &&
                       (trail[i].var_off - trail[i - 1].var_off).minCoeff() >= 0.0;
    if (small && grown) {
      first_hold = static_cast<int>(i);
      break;
    }
  }
  REQUIRE(first_hold > 0);
  for (size_t i = first_hold + 1; i < trail.size(); ++i) {
    const VectorXd diff = trail[i].omega - trail[i - 1].omega;
    CHECK(diff.maxCoeff() <= 0.0);
  }
  CHECK(fr.iterations > first_hold);
}
