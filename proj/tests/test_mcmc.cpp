#include "doctest.h"

#include <cmath>

#include "mcmc.hpp"
#include "oracles.hpp"
#include "rng.hpp"
#include "vb.hpp"

using namespace dynsparse;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Dataset small_data(int n, int p, std::uint64_t seed) {
  std::mt19937_64 rng = make_rng(seed, "mcmc-data");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Dataset d;
  d.y.resize(n);
  d.X.resize(n, p);
  for (int i = 0; i < n; ++i) {
    d.y(i) = gauss(rng);
    for (int j = 0; j < p; ++j) d.X(i, j) = gauss(rng);
  }
  d.names.assign(p, "x");
  return d;
}

struct MeanVar {
  double mean;
  double se;  // standard error of the mean
};

MeanVar mc_mean(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  m /= xs.size();
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  v /= (xs.size() - 1);
  return {m, std::sqrt(v / xs.size())};
}

}  // namespace

TEST_CASE("polya-gamma sampler moments") {
  std::mt19937_64 rng = make_rng(61, "pg-moments");
  const int draws = 100000;

  SUBCASE("mean and variance at zero tilt") {
    std::vector<double> xs(draws);
    for (auto& x : xs) {
      x = sample_pg1(0.0, rng);
      CHECK(x > 0.0);
    }
    const MeanVar m = mc_mean(xs);
    CHECK(std::abs(m.mean - 0.25) < 3.0 * m.se);
    double var = 0.0;
    for (double x : xs) var += (x - m.mean) * (x - m.mean);
    var /= (draws - 1);
    // Var[PG(1,0)] = 1/24; the sampling error of the variance is ~ sqrt(2/n)*var
    const double se_var = std::sqrt(2.0 / draws) * var * 2.0;
    CHECK(std::abs(var - 1.0 / 24.0) < 3.0 * se_var);
  }
  SUBCASE("mean at c = 2 matches tanh(1)/4") {
    std::vector<double> xs(draws);
    for (auto& x : xs) x = sample_pg1(2.0, rng);
    const MeanVar m = mc_mean(xs);
    CHECK(std::abs(m.mean - std::tanh(1.0) / 4.0) < 3.0 * m.se);
  }
  SUBCASE("mean at c = 1 matches the analytic pg_mean") {
    std::vector<double> xs(draws);
    for (auto& x : xs) x = sample_pg1(1.0, rng);
    const MeanVar m = mc_mean(xs);
    CHECK(std::abs(m.mean - pg_mean(1.0)) < 3.0 * m.se);
  }
  SUBCASE("large tilt stays finite and positive") {
    for (int r = 0; r < 1000; ++r) {
      const double x = sample_pg1(50.0, rng);
      CHECK(x > 0.0);
      CHECK(std::isfinite(x));
    }
  }
  SUBCASE("deterministic per seed") {
    std::mt19937_64 a = make_rng(62, "pg-det");
    std::mt19937_64 b = make_rng(62, "pg-det");
    for (int r = 0; r < 50; ++r) CHECK(sample_pg1(1.3, a) == sample_pg1(1.3, b));
  }
}

TEST_CASE("gibbs b-block with excluded predictor samples the prior") {
  const int n = 12;
  Dataset d = small_data(n, 1, 63);
  Hyperparams hp;
  GibbsSampler sampler(d, hp, 64);
  sampler.gamma[0].setZero();
  sampler.eta2(0) = 2.0;
  sampler.refresh_residual_cache();

  const MatrixXd prior_cov =
      oracle::dense_inverse(dense_from(sampler.precision()) / 2.0);
  const int draws = 40000;
  VectorXd mean_acc = VectorXd::Zero(n + 1);
  VectorXd sq_acc = VectorXd::Zero(n + 1);
  for (int r = 0; r < draws; ++r) {
    sampler.sample_b(0);
    mean_acc += sampler.b[0];
    sq_acc += sampler.b[0].cwiseProduct(sampler.b[0]);
  }
  mean_acc /= draws;
  sq_acc /= draws;
  for (int i = 0; i <= n; ++i) {
    const double sd = std::sqrt(prior_cov(i, i));
    CHECK(std::abs(mean_acc(i)) < 4.0 * sd / std::sqrt(static_cast<double>(draws)) + 0.05);
    CHECK(sq_acc(i) - mean_acc(i) * mean_acc(i) ==
          doctest::Approx(prior_cov(i, i)).epsilon(0.08));
  }
}

TEST_CASE("gibbs sigma2 block matches the conjugate posterior") {
  const int n = 30;
  Dataset d = small_data(n, 1, 65);
  Hyperparams hp;
  hp.a_sigma = 3.0;
  hp.b_sigma = 2.0;
  GibbsSampler sampler(d, hp, 66);
  // freeze gamma and b, so sigma^2 | rest is exactly inverse-gamma
  sampler.gamma[0].setOnes();
  for (int i = 0; i <= n; ++i) sampler.b[0](i) = 0.3;
  sampler.refresh_residual_cache();
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = d.y(i) - d.X(i, 0) * 0.3;
    ss += e * e;
  }
  const double a_post = hp.a_sigma + 0.5 * n;
  const double b_post = hp.b_sigma + 0.5 * ss;
  const double want_mean = b_post / (a_post - 1.0);

  const int draws = 60000;
  std::vector<double> xs(draws);
  for (auto& x : xs) {
    sampler.sample_sigma2();
    x = sampler.sigma2;
  }
  const MeanVar m = mc_mean(xs);
  CHECK(std::abs(m.mean - want_mean) < 4.0 * m.se);
}

TEST_CASE("two chains with the same seed coincide") {
  Dataset d = small_data(15, 2, 67);
  Hyperparams hp;
  const GibbsDraws a = run_gibbs(d, hp, 40, 10, 99);
  const GibbsDraws b = run_gibbs(d, hp, 40, 10, 99);
  CHECK(a.ndraws == 30);
  for (int j = 0; j < 2; ++j) {
    CHECK((a.b[j] - b.b[j]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.gamma[j] - b.gamma[j]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.omega[j] - b.omega[j]).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK((a.sigma2 - b.sigma2).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(run_gibbs(d, hp, 10, 10, 1), std::invalid_argument);
  SUBCASE("gamma draws are binary, variance draws positive") {
    for (int j = 0; j < 2; ++j) {
      for (int r = 0; r < a.ndraws; ++r)
        for (int t = 0; t < a.n; ++t) {
          const double g = a.gamma[j](r, t);
          CHECK((g == 0.0 || g == 1.0));
          CHECK(a.z[j](r, t) > 0.0);
        }
      CHECK(a.eta2.col(j).minCoeff() > 0.0);
      CHECK(a.xi2.col(j).minCoeff() > 0.0);
    }
    CHECK(a.sigma2.minCoeff() > 0.0);
  }
}

// Geweke-style successive-conditional check: simulating (theta, y) by
// alternating Gibbs sweeps with fresh data draws must reproduce the prior
// marginals of theta. Run with proper hyper-priors so the compared moments
// exist.
TEST_CASE("geweke prior reproduction on a tiny model") {
  const int n = 10, p = 1;
  Hyperparams hp;
  hp.a_sigma = 3.0;
  hp.b_sigma = 3.0;
  hp.a_eta = 3.0;
  hp.b_eta = 3.0;
  hp.a_xi = 3.0;
  hp.b_xi = 3.0;
  hp.k0 = 10.0;

  std::mt19937_64 rng = make_rng(71, "geweke");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const TridiagPrecision q = build_precision(n, hp.k0);

  Dataset d = small_data(n, p, 72);  // X fixed across both simulators

  auto draw_ig = [&](double a, double b) {
    std::gamma_distribution<double> gam(a, 1.0 / b);
    return 1.0 / gam(rng);
  };
  auto draw_y_given = [&](const VectorXd& b_path, const VectorXd& gamma_path, double s2) {
    for (int i = 0; i < n; ++i)
      d.y(i) = d.X(i, 0) * gamma_path(i) * b_path(i + 1) + std::sqrt(s2) * gauss(rng);
  };

  // Marginal-conditional simulator: parameter draws straight from the prior.
  const int reps = 20000;
  std::vector<double> prior_logeta, prior_logxi, prior_b_mid, prior_b_sq;
  prior_logeta.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    const double eta2 = draw_ig(hp.a_eta, hp.b_eta);
    const double xi2 = draw_ig(hp.a_xi, hp.b_xi);
    TridiagCholesky chol_b(SymTridiag::from_precision(q, 1.0 / eta2));
    const VectorXd b_path = chol_b.sample(rng);
    prior_logeta.push_back(std::log(eta2));
    prior_logxi.push_back(std::log(xi2));
    prior_b_mid.push_back(b_path(n / 2));
    prior_b_sq.push_back(b_path(n / 2) * b_path(n / 2));
  }

  // Successive-conditional simulator: Gibbs sweep, then regenerate y.
  GibbsSampler sampler(d, hp, 73);
  const int chain = 60000, thin = 3;
  std::vector<double> post_logeta, post_logxi, post_b_mid, post_b_sq;
  for (int r = 0; r < chain; ++r) {
    sampler.sweep();
    draw_y_given(sampler.b[0], sampler.gamma[0], sampler.sigma2);
    sampler.refresh_residual_cache();
    if (r % thin == 0) {
      post_logeta.push_back(std::log(sampler.eta2(0)));
      post_logxi.push_back(std::log(sampler.xi2(0)));
      post_b_mid.push_back(sampler.b[0](n / 2));
      post_b_sq.push_back(sampler.b[0](n / 2) * sampler.b[0](n / 2));
    }
  }

  auto compare = [&](const std::vector<double>& a, const std::vector<double>& b,
                     double slack) {
    const MeanVar ma = mc_mean(a);
    const MeanVar mb = mc_mean(b);
    // chain autocorrelation inflates the nominal SE; allow a generous factor
    const double tol = 5.0 * std::sqrt(ma.se * ma.se + mb.se * mb.se) + slack;
    CHECK(std::abs(ma.mean - mb.mean) < tol);
  };
  compare(prior_logeta, post_logeta, 0.05);
  compare(prior_logxi, post_logxi, 0.05);
  compare(prior_b_mid, post_b_mid, 0.05);
  compare(prior_b_sq, post_b_sq, 0.15);
}
