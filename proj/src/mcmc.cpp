#include "mcmc.hpp"

#include <cmath>
#include <limits>

#include "vb.hpp"

namespace dynsparse {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTrunc = 0.64;  // body/tail split of the Jacobi proposal

double log_ndtr(double x) {
  if (x > -10.0) return std::log(0.5 * std::erfc(-x / std::sqrt(2.0)));
  // asymptotic tail: log phi(x) - log|x| + log(1 - 1/x^2 + 3/x^4)
  const double x2 = x * x;
  return -0.5 * x2 - 0.5 * std::log(2.0 * kPi) - std::log(-x) +
         std::log1p(-1.0 / x2 + 3.0 / (x2 * x2));
}

// Series coefficients of the tilted Jacobi density, piecewise around the
// truncation point.
double jacobi_coef(int k, double x) {
  const double h = k + 0.5;
  if (x <= kTrunc)
    return kPi * h * std::pow(2.0 / (kPi * x), 1.5) * std::exp(-2.0 * h * h / x);
  return kPi * h * std::exp(-0.5 * h * h * kPi * kPi * x);
}

double exponential_draw(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u;
  do {
    u = unif(rng);
  } while (u <= 0.0);
  return -std::log(u);
}

// Inverse-Gaussian IG(1/z, 1) restricted to (0, t]; the z = 0 limit is the
// one-sided stable body handled by the chi-square branch.
double truncated_inv_gauss(double z, double t, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double mu = (z > 0.0) ? 1.0 / z : std::numeric_limits<double>::infinity();
  if (mu > t) {
    for (;;) {
      double e1, e2;
      do {
        e1 = exponential_draw(rng);
        e2 = exponential_draw(rng);
      } while (e1 * e1 > 2.0 * e2 / t);
      const double x = t / ((1.0 + t * e1) * (1.0 + t * e1));
      if (unif(rng) <= std::exp(-0.5 * z * z * x)) return x;
    }
  }
  for (;;) {
    // standard inverse-Gaussian draw, rejected until it lands in (0, t]
    const double g = gauss(rng);
    const double y = g * g;
    double x = mu + 0.5 * mu * mu * y - 0.5 * mu * std::sqrt(4.0 * mu * y + mu * mu * y * y);
    if (unif(rng) > mu / (mu + x)) x = mu * mu / x;
    if (x <= t && x > 0.0) return x;
  }
}

// P(IG(1/z, 1) <= t), scaled by 2 exp(-z): the mass the proposal assigns to
// the body. Computed in log space so large tilts do not overflow.
double body_mass(double z, double t) {
  const double rt = std::sqrt(t);
  const double term1 = std::exp(-z + log_ndtr((t * z - 1.0) / rt));
  const double term2 = std::exp(z + log_ndtr(-(t * z + 1.0) / rt));
  return 2.0 * (term1 + term2);
}

}  // namespace

double sample_pg1(double c, std::mt19937_64& rng) {
  if (c < 0.0) c = -c;  // the tilt enters through c^2 only
  const double z = 0.5 * c;
  const double rate = kPi * kPi / 8.0 + 0.5 * z * z;
  const double tail_mass = kPi / (2.0 * rate) * std::exp(-rate * kTrunc);
  const double body = body_mass(z, kTrunc);
  const double tail_prob = tail_mass / (tail_mass + body);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (;;) {
    double x;
    if (unif(rng) < tail_prob)
      x = kTrunc + exponential_draw(rng) / rate;
    else
      x = truncated_inv_gauss(z, kTrunc, rng);
    // alternating-series accept/reject on the Jacobi coefficients
    double s = jacobi_coef(0, x);
    const double y = unif(rng) * s;
    int k = 0;
    for (;;) {
      ++k;
      if (k % 2 == 1) {
        s -= jacobi_coef(k, x);
        if (y <= s) return 0.25 * x;
      } else {
        s += jacobi_coef(k, x);
        if (y > s) break;  // reject this proposal
      }
    }
  }
}

GibbsSampler::GibbsSampler(const Dataset& data, const Hyperparams& hp, std::uint64_t seed)
    : data_(&data), hp_(hp), q_(build_precision(data.n(), hp.k0)),
      rng_(make_rng(seed, "mcmc")) {
  data.validate();
  hp.validate();
  const int n = data.n();
  const int p = data.p();
  b.assign(p, VectorXd::Zero(n + 1));
  omega.assign(p, VectorXd::Zero(n + 1));
  gamma.assign(p, VectorXd::Ones(n));
  z.assign(p, VectorXd::Constant(n, 0.25));
  eta2 = VectorXd::Ones(p);
  xi2 = VectorXd::Ones(p);
  const double ybar = data.y.mean();
  sigma2 = std::max((data.y.array() - ybar).square().sum() / std::max(1, n - 1), 1e-8);
  refresh_residual_cache();
}

void GibbsSampler::refresh_residual_cache() {
  const int n = data_->n();
  fitted_ = VectorXd::Zero(n);
  for (int k = 0; k < data_->p(); ++k)
    for (int i = 0; i < n; ++i)
      fitted_(i) += data_->X(i, k) * gamma[k](i) * b[k](i + 1);
}

VectorXd GibbsSampler::partial_resid(int j) const {
  const int n = data_->n();
  VectorXd r(n + 1);
  r(0) = 0.0;
  for (int i = 0; i < n; ++i)
    r(i + 1) = data_->y(i) - fitted_(i) + data_->X(i, j) * gamma[j](i) * b[j](i + 1);
  return r;
}

void GibbsSampler::sample_b(int j) {
  const int n = data_->n();
  const VectorXd resid = partial_resid(j);
  VectorXd shift = VectorXd::Zero(n + 1);
  VectorXd rhs = VectorXd::Zero(n + 1);
  const double inv_s2 = 1.0 / sigma2;
  for (int i = 0; i < n; ++i) {
    const double gx = gamma[j](i) * data_->X(i, j);
    shift(i + 1) = gx * gx * inv_s2;  // gamma is binary, so gamma^2 = gamma
    rhs(i + 1) = gx * inv_s2 * resid(i + 1);
  }
  try {
    TridiagCholesky chol(SymTridiag::shifted(q_, 1.0 / eta2(j), shift));
    b[j] = chol.solve(rhs) + chol.sample(rng_);
  } catch (const numeric_error& e) {
    throw numeric_error("gibbs b-block, predictor " + std::to_string(j), e.index());
  }
}

void GibbsSampler::sample_eta2(int j) {
  const VectorXd zero_d = VectorXd::Zero(q_.dim());
  const VectorXd zero_o = VectorXd::Zero(q_.dim() - 1);
  const double quad = quad_form_expectation(b[j], zero_d, zero_o, q_);
  const double shape = hp_.a_eta + 0.5 * (data_->n() + 1);
  const double scale = hp_.b_eta + 0.5 * quad;
  std::gamma_distribution<double> gam(shape, 1.0 / scale);
  eta2(j) = 1.0 / gam(rng_);
}

void GibbsSampler::sample_omega(int j) {
  const int n = data_->n();
  VectorXd shift(n + 1), rhs(n + 1);
  shift(0) = 0.0;
  rhs(0) = 0.0;
  for (int i = 0; i < n; ++i) {
    shift(i + 1) = z[j](i);
    rhs(i + 1) = gamma[j](i) - 0.5;
  }
  try {
    TridiagCholesky chol(SymTridiag::shifted(q_, 1.0 / xi2(j), shift));
    omega[j] = chol.solve(rhs) + chol.sample(rng_);
  } catch (const numeric_error& e) {
    throw numeric_error("gibbs omega-block, predictor " + std::to_string(j), e.index());
  }
}

void GibbsSampler::sample_xi2(int j) {
  const VectorXd zero_d = VectorXd::Zero(q_.dim());
  const VectorXd zero_o = VectorXd::Zero(q_.dim() - 1);
  const double quad = quad_form_expectation(omega[j], zero_d, zero_o, q_);
  const double shape = hp_.a_xi + 0.5 * (data_->n() + 1);
  const double scale = hp_.b_xi + 0.5 * quad;
  std::gamma_distribution<double> gam(shape, 1.0 / scale);
  xi2(j) = 1.0 / gam(rng_);
}

void GibbsSampler::sample_z(int j, int t) {
  // exp(-z omega^2 / 2) tilt of PG(1, 0), i.e. PG(1, |omega|)
  z[j](t - 1) = sample_pg1(std::abs(omega[j](t)), rng_);
}

void GibbsSampler::sample_gamma(int j, int t) {
  const int i = t - 1;
  const double x = data_->X(i, j);
  const double resid_wo_j =
      data_->y(i) - fitted_(i) + x * gamma[j](i) * b[j](i + 1);
  const double bx = b[j](t) * x;
  const double logit = omega[j](t) - 0.5 / sigma2 * (bx * bx - 2.0 * bx * resid_wo_j);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double old = gamma[j](i);
  const double draw = unif(rng_) < expit(logit) ? 1.0 : 0.0;
  gamma[j](i) = draw;
  fitted_(i) += x * b[j](i + 1) * (draw - old);
}

void GibbsSampler::sample_sigma2() {
  const int n = data_->n();
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = data_->y(i) - fitted_(i);
    ss += e * e;
  }
  std::gamma_distribution<double> gam(hp_.a_sigma + 0.5 * n,
                                      1.0 / (hp_.b_sigma + 0.5 * ss));
  sigma2 = 1.0 / gam(rng_);
}

void GibbsSampler::sweep() {
  const int n = data_->n();
  for (int j = 0; j < data_->p(); ++j) {
    const VectorXd old_b = b[j];
    sample_b(j);
    // refresh the fitted cache with the new coefficient path
    for (int i = 0; i < n; ++i)
      fitted_(i) += data_->X(i, j) * gamma[j](i) * (b[j](i + 1) - old_b(i + 1));
    sample_eta2(j);
    sample_omega(j);
    sample_xi2(j);
    for (int t = 1; t <= n; ++t) {
      sample_z(j, t);
      sample_gamma(j, t);
    }
  }
  sample_sigma2();
}

GibbsDraws run_gibbs(const Dataset& data, const Hyperparams& hp, int draws, int burnin,
                     std::uint64_t seed) {
  if (draws <= burnin) throw std::invalid_argument("run_gibbs: draws must exceed burnin");
  GibbsSampler sampler(data, hp, seed);
  const int n = data.n();
  const int p = data.p();
  const int keep = draws - burnin;

  GibbsDraws out;
  out.n = n;
  out.p = p;
  out.ndraws = keep;
  out.b.assign(p, MatrixXd(keep, n + 1));
  out.omega.assign(p, MatrixXd(keep, n + 1));
  out.gamma.assign(p, MatrixXd(keep, n));
  out.z.assign(p, MatrixXd(keep, n));
  out.eta2.resize(keep, p);
  out.xi2.resize(keep, p);
  out.sigma2.resize(keep);

  for (int r = 0; r < draws; ++r) {
    sampler.sweep();
    if (r < burnin) continue;
    const int s = r - burnin;
    for (int j = 0; j < p; ++j) {
      out.b[j].row(s) = sampler.b[j].transpose();
      out.omega[j].row(s) = sampler.omega[j].transpose();
      out.gamma[j].row(s) = sampler.gamma[j].transpose();
      out.z[j].row(s) = sampler.z[j].transpose();
      out.eta2(s, j) = sampler.eta2(j);
      out.xi2(s, j) = sampler.xi2(j);
    }
    out.sigma2(s) = sampler.sigma2;
  }
  return out;
}

}  // namespace dynsparse
