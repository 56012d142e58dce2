#include "doctest.h"

#include <random>

#include "gmrf.hpp"
#include "oracles.hpp"
#include "rng.hpp"

using namespace dynsparse;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("build_precision basic shapes") {
  const TridiagPrecision q = build_precision(2, 1.0);
  CHECK(q.diag(0) == doctest::Approx(2.0));
  CHECK(q.diag(1) == doctest::Approx(2.0));
  CHECK(q.diag(2) == doctest::Approx(1.0));
  CHECK(q.offdiag(0) == doctest::Approx(-1.0));
  CHECK(q.offdiag(1) == doctest::Approx(-1.0));

  const TridiagPrecision diffuse = build_precision(1, 1e12);
  CHECK(diffuse.diag(0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(diffuse.diag(1) == doctest::Approx(1.0));
  CHECK(diffuse.offdiag(0) == doctest::Approx(-1.0));

  // SPD: smallest eigenvalue of the dense form is positive
  const TridiagPrecision q5 = build_precision(5, 100.0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(dense_from(q5));
  CHECK(eig.eigenvalues().minCoeff() > 0.0);

  CHECK_THROWS_AS(build_precision(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_precision(3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_precision(3, -2.0), std::invalid_argument);
}

TEST_CASE("banded solve matches dense oracle") {
  SUBCASE("identity") {
    SymTridiag eye;
    eye.diag = VectorXd::Ones(4);
    eye.off = VectorXd::Zero(3);
    TridiagCholesky chol(eye);
    VectorXd e1 = VectorXd::Zero(4);
    e1(0) = 1.0;
    CHECK((chol.solve(e1) - e1).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("random-walk precision") {
    const TridiagPrecision q = build_precision(3, 1.0);
    TridiagCholesky chol(SymTridiag::from_precision(q));
    const VectorXd rhs = VectorXd::Ones(4);
    const VectorXd got = chol.solve(rhs);
    const VectorXd want = oracle::dense_solve(dense_from(q), rhs);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("non-SPD input reports the pivot") {
    SymTridiag bad;
    bad.diag = VectorXd::Ones(3);
    bad.diag(1) = 0.0;
    bad.off = VectorXd::Zero(2);
    try {
      TridiagCholesky chol(bad);
      FAIL("expected numeric_error");
    } catch (const numeric_error& e) {
      CHECK(e.index() == 1);
    }
  }
}

TEST_CASE("banded solve on random SPD tridiagonals up to size 50") {
  std::mt19937_64 rng = make_rng(7, "gmrf-random-solve");
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int m : {2, 5, 17, 50}) {
    for (int rep = 0; rep < 4; ++rep) {
      const SymTridiag a = oracle::random_spd_tridiag(m, rng);
      VectorXd rhs(m);
      for (int i = 0; i < m; ++i) rhs(i) = gauss(rng);
      TridiagCholesky chol(a);
      const VectorXd got = chol.solve(rhs);
      const VectorXd want = oracle::dense_solve(dense_from(a), rhs);
      const double scale = std::max(1.0, want.cwiseAbs().maxCoeff());
      CHECK((got - want).cwiseAbs().maxCoeff() / scale < 1e-10);
    }
  }
}

TEST_CASE("selected inverse band matches the dense inverse") {
  std::mt19937_64 rng = make_rng(11, "gmrf-selected-inverse");
  for (int m : {2, 3, 9, 31}) {
    const SymTridiag a = oracle::random_spd_tridiag(m, rng);
    TridiagCholesky chol(a);
    VectorXd inv_diag, inv_off;
    chol.inverse_band(inv_diag, inv_off);
    const MatrixXd dense = oracle::dense_inverse(dense_from(a));
    for (int i = 0; i < m; ++i) CHECK(inv_diag(i) == doctest::Approx(dense(i, i)).epsilon(1e-10));
    for (int i = 0; i + 1 < m; ++i)
      CHECK(inv_off(i) == doctest::Approx(dense(i, i + 1)).epsilon(1e-10));
    const MatrixXd full = chol.inverse_dense();
    CHECK((full - dense).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("quad_form_expectation") {
  const TridiagPrecision q = build_precision(2, 1.0);
  SUBCASE("mu = 0, Sigma = I gives trace(Q)") {
    const VectorXd mu = VectorXd::Zero(3);
    const VectorXd sig_d = VectorXd::Ones(3);
    const VectorXd sig_o = VectorXd::Zero(2);
    CHECK(quad_form_expectation(mu, sig_d, sig_o, q) == doctest::Approx(5.0));
  }
  SUBCASE("Sigma = 0 gives the pure quadratic form") {
    const VectorXd mu = VectorXd::Ones(3);
    const VectorXd sig_d = VectorXd::Zero(3);
    const VectorXd sig_o = VectorXd::Zero(2);
    // ones' Q ones telescopes down to 1/k0
    CHECK(quad_form_expectation(mu, sig_d, sig_o, q) == doctest::Approx(1.0));
  }
  SUBCASE("random dense oracle") {
    std::mt19937_64 rng = make_rng(13, "gmrf-quad");
    std::normal_distribution<double> gauss(0.0, 1.0);
    const TridiagPrecision q5 = build_precision(5, 3.0);
    VectorXd mu(6);
    for (int i = 0; i < 6; ++i) mu(i) = gauss(rng);
    // dense SPD covariance, banded part consumed by the implementation
    MatrixXd half(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) half(i, j) = gauss(rng);
    MatrixXd sigma = half * half.transpose() + 6.0 * MatrixXd::Identity(6, 6);
    // zero out beyond the band: tr(Sigma Q) only touches the band of Sigma
    VectorXd sig_d(6), sig_o(5);
    for (int i = 0; i < 6; ++i) sig_d(i) = sigma(i, i);
    for (int i = 0; i < 5; ++i) sig_o(i) = sigma(i, i + 1);
    const MatrixXd qd = dense_from(q5);
    const double want = mu.dot(qd * mu) + (sigma * qd).trace();
    CHECK(quad_form_expectation(mu, sig_d, sig_o, q5) == doctest::Approx(want).epsilon(1e-12));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(quad_form_expectation(VectorXd::Zero(2), VectorXd::Zero(3),
                                          VectorXd::Zero(2), q),
                    std::invalid_argument);
  }
}

TEST_CASE("gmrf sampling") {
  SUBCASE("degenerate variance pins the draw at the mean") {
    SymTridiag tight;
    tight.diag = VectorXd::Constant(5, 1e12);
    tight.off = VectorXd::Zero(4);
    TridiagCholesky chol(tight);
    std::mt19937_64 rng = make_rng(17, "gmrf-sample-tight");
    const VectorXd mean = VectorXd::LinSpaced(5, -1.0, 1.0);
    const VectorXd draw = mean + chol.sample(rng);
    CHECK((draw - mean).cwiseAbs().maxCoeff() < 1e-4);
  }
  SUBCASE("sample covariance matches the dense inverse") {
    const TridiagPrecision q = build_precision(2, 1.0);
    TridiagCholesky chol(SymTridiag::from_precision(q));
    std::mt19937_64 rng = make_rng(19, "gmrf-sample-cov");
    const int draws = 100000;
    MatrixXd acc = MatrixXd::Zero(3, 3);
    VectorXd mean_acc = VectorXd::Zero(3);
    for (int r = 0; r < draws; ++r) {
      const VectorXd x = chol.sample(rng);
      acc += x * x.transpose();
      mean_acc += x;
    }
    mean_acc /= draws;
    const MatrixXd cov = acc / draws - mean_acc * mean_acc.transpose();
    const MatrixXd want = oracle::dense_inverse(dense_from(q));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(cov(i, j) == doctest::Approx(want(i, j)).epsilon(0.05));
  }
  SUBCASE("same seed, same vector") {
    const TridiagPrecision q = build_precision(4, 2.0);
    TridiagCholesky chol(SymTridiag::from_precision(q));
    std::mt19937_64 rng1 = make_rng(23, "gmrf-sample-det");
    std::mt19937_64 rng2 = make_rng(23, "gmrf-sample-det");
    CHECK((chol.sample(rng1) - chol.sample(rng2)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("Q inverse is entrywise non-negative") {
  for (int n = 1; n <= 8; ++n) {
    for (double k0 : {0.1, 1.0, 100.0}) {
      const TridiagPrecision q = build_precision(n, k0);
      const MatrixXd inv = oracle::dense_inverse(dense_from(q));
      CHECK(inv.minCoeff() >= -1e-12);
    }
  }
}
