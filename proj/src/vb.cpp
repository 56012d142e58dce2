#include "vb.hpp"

#include <cmath>

namespace dynsparse {

double expit(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double pg_mean(double c) {
  if (c < 0.0) throw std::invalid_argument("pg_mean: tilt must be non-negative");
  if (c < 1e-8) return 0.25;  // series limit: 1/4 - c^2/48 + O(c^4)
  return std::tanh(0.5 * c) / (2.0 * c);
}

SigmaMoments lognormal_sigma_moments(double mu, double var) {
  if (var < 0.0) throw std::invalid_argument("lognormal_sigma_moments: negative variance");
  return {std::exp(mu + 0.5 * var), std::exp(-mu + 0.5 * var)};
}

ModelState init_state(const Dataset& data, const Hyperparams& hp, bool heteroskedastic) {
  data.validate();
  hp.validate();
  const int n = data.n();
  const int p = data.p();
  const TridiagPrecision q = build_precision(n, hp.k0);

  ModelState st;
  st.n = n;
  st.heteroskedastic = heteroskedastic;
  st.pred.resize(p);

  // Prior-mean initialization for the covariance bands.
  VectorXd b0_diag, b0_off;
  {
    TridiagCholesky chol(SymTridiag::from_precision(q, hp.a_eta / hp.b_eta));
    chol.inverse_band(b0_diag, b0_off);
  }
  VectorXd om0_diag, om0_off;
  {
    VectorXd shift = VectorXd::Constant(n + 1, 0.25);
    shift(0) = 0.0;
    TridiagCholesky chol(SymTridiag::shifted(q, hp.a_xi / hp.b_xi, shift));
    chol.inverse_band(om0_diag, om0_off);
  }

  for (auto& pq : st.pred) {
    pq.b_mean = VectorXd::Zero(n + 1);
    pq.b_var_diag = b0_diag;
    pq.b_var_off = b0_off;
    pq.gamma_prob = VectorXd::Constant(n, 0.5);
    pq.gamma_logit = VectorXd::Zero(n);
    pq.omega_mean = VectorXd::Zero(n + 1);
    pq.omega_var_diag = om0_diag;
    pq.omega_var_off = om0_off;
    pq.z_mean = VectorXd::Constant(n, 0.25);  // PG(1,0) mean
    pq.eta2 = {hp.a_eta, hp.b_eta};
    pq.xi2 = {hp.a_xi, hp.b_xi};
  }

  st.sigma2 = {hp.a_sigma, hp.b_sigma};
  st.nu2 = {hp.a_nu, hp.b_nu};
  st.inv_sigma2 = VectorXd::Constant(n, st.sigma2.mean_inv());
  if (heteroskedastic) {
    const double ybar = data.y.mean();
    double vy = (data.y.array() - ybar).square().sum() / std::max(1, n - 1);
    vy = std::max(vy, 1e-8);
    st.h_mean = VectorXd::Constant(n + 1, std::log(vy));
    st.h_var_diag = VectorXd::Constant(n + 1, 0.1);
    st.h_var_off = VectorXd::Zero(n);
    for (int t = 1; t <= n; ++t)
      st.inv_sigma2(t - 1) = std::max(
          lognormal_sigma_moments(st.h_mean(t), st.h_var_diag(t)).mean_inv, 1e-12);
  }
  return st;
}

VectorXd partial_residuals(const ModelState& state, const Dataset& data, int j) {
  const int n = state.n;
  VectorXd r(n + 1);
  r(0) = 0.0;
  for (int i = 0; i < n; ++i) {
    double fitted = 0.0;
    for (int k = 0; k < state.p(); ++k) {
      if (k == j || !state.pred[k].active) continue;
      fitted += data.X(i, k) * state.pred[k].gamma_prob(i) * state.pred[k].b_mean(i + 1);
    }
    r(i + 1) = data.y(i) - fitted;
  }
  return r;
}

void update_b(ModelState& state, const Dataset& data, int j, const TridiagPrecision& q,
              const VectorXd& resid) {
  const int n = state.n;
  PredictorQ& pq = state.pred[j];
  VectorXd shift = VectorXd::Zero(n + 1);
  VectorXd rhs = VectorXd::Zero(n + 1);
  for (int i = 0; i < n; ++i) {
    const double x = data.X(i, j);
    const double d = state.inv_sigma2(i) * pq.gamma_prob(i) * x;
    shift(i + 1) = d * x;  // gamma enters once; this is not d^2
    rhs(i + 1) = d * resid(i + 1);
  }
  try {
    TridiagCholesky chol(SymTridiag::shifted(q, pq.eta2.mean_inv(), shift));
    pq.b_mean = chol.solve(rhs);
    chol.inverse_band(pq.b_var_diag, pq.b_var_off);
  } catch (const numeric_error& e) {
    throw numeric_error("update_b: non-SPD posterior precision for predictor " +
                            std::to_string(j),
                        e.index());
  }
}

double update_gamma(ModelState& state, const Dataset& data, int j, int t,
                    const VectorXd& resid) {
  PredictorQ& pq = state.pred[j];
  const double x = data.X(t - 1, j);
  const double b2 = pq.b_mean(t) * pq.b_mean(t) + pq.b_var_diag(t);
  const double logit =
      pq.omega_mean(t) -
      0.5 * state.inv_sigma2(t - 1) * (x * x * b2 - 2.0 * pq.b_mean(t) * x * resid(t));
  pq.gamma_logit(t - 1) = logit;
  pq.gamma_prob(t - 1) = expit(logit);
  return logit;
}

void update_omega(ModelState& state, int j, const TridiagPrecision& q) {
  const int n = state.n;
  PredictorQ& pq = state.pred[j];
  VectorXd shift(n + 1), rhs(n + 1);
  shift(0) = 0.0;
  rhs(0) = 0.0;
  for (int i = 0; i < n; ++i) {
    shift(i + 1) = pq.z_mean(i);
    rhs(i + 1) = pq.gamma_prob(i) - 0.5;
  }
  try {
    TridiagCholesky chol(SymTridiag::shifted(q, pq.xi2.mean_inv(), shift));
    pq.omega_mean = chol.solve(rhs);
    chol.inverse_band(pq.omega_var_diag, pq.omega_var_off);
  } catch (const numeric_error& e) {
    throw numeric_error("update_omega: non-SPD posterior precision for predictor " +
                            std::to_string(j),
                        e.index());
  }
}

void update_z(ModelState& state, int j, int t) {
  PredictorQ& pq = state.pred[j];
  const double m2 = pq.omega_mean(t) * pq.omega_mean(t) + pq.omega_var_diag(t);
  pq.z_mean(t - 1) = pg_mean(std::sqrt(m2));
}

IgUpdate update_variance_ig(double a_prior, double b_prior, double quad, int n) {
  IgUpdate up;
  up.a_post = a_prior + 0.5 * (n + 1);
  up.b_post = b_prior + 0.5 * quad;
  if (!(up.b_post > 0.0))
    throw numeric_error("update_variance_ig: nonpositive posterior scale");
  up.mean_inv = std::max(up.a_post / up.b_post, InverseGammaQ::kFloor);
  return up;
}

double expected_sq_residual(const ModelState& state, const Dataset& data, int t) {
  const int i = t - 1;
  double point = data.y(i);
  double var = 0.0;
  for (int k = 0; k < state.p(); ++k) {
    const PredictorQ& pq = state.pred[k];
    if (!pq.active) continue;
    const double x = data.X(i, k);
    const double g = pq.gamma_prob(i);
    const double mb = pq.b_mean(t);
    const double vb = pq.b_var_diag(t);
    point -= x * g * mb;
    var += x * x * (g * (mb * mb + vb) - g * g * mb * mb);
  }
  return point * point + var;
}

void update_sigma2_homo(ModelState& state, const Dataset& data, const Hyperparams& hp) {
  const int n = state.n;
  double ee = 0.0;
  for (int t = 1; t <= n; ++t) ee += expected_sq_residual(state, data, t);
  state.sigma2.a = hp.a_sigma + 0.5 * n;
  state.sigma2.b = hp.b_sigma + 0.5 * ee;
  state.inv_sigma2.setConstant(state.sigma2.mean_inv());
}

double sv_objective(const VectorXd& h_mean, const VectorXd& h_var_diag,
                    const VectorXd& h_var_off, const VectorXd& eps2, double inv_nu2,
                    const TridiagPrecision& q) {
  const int n = q.n;
  double s = 0.0;
  for (int t = 1; t <= n; ++t)
    s += -0.5 * h_mean(t) -
         0.5 * eps2(t - 1) * std::exp(-h_mean(t) + 0.5 * h_var_diag(t));
  s -= 0.5 * inv_nu2 * quad_form_expectation(h_mean, h_var_diag, h_var_off, q);
  return s;
}

namespace {
VectorXd tridiag_mul(const TridiagPrecision& q, const VectorXd& v) {
  const int m = q.dim();
  VectorXd out(m);
  for (int i = 0; i < m; ++i) {
    double acc = q.diag(i) * v(i);
    if (i > 0) acc += q.offdiag(i - 1) * v(i - 1);
    if (i + 1 < m) acc += q.offdiag(i) * v(i + 1);
    out(i) = acc;
  }
  return out;
}
}  // namespace

VectorXd sv_gradient(const VectorXd& h_mean, const VectorXd& h_var_diag,
                     const VectorXd& eps2, double inv_nu2, const TridiagPrecision& q) {
  const int n = q.n;
  VectorXd g = -inv_nu2 * tridiag_mul(q, h_mean);
  for (int t = 1; t <= n; ++t)
    g(t) += -0.5 + 0.5 * eps2(t - 1) * std::exp(-h_mean(t) + 0.5 * h_var_diag(t));
  return g;
}

SymTridiag sv_neg_hessian(const VectorXd& h_mean, const VectorXd& h_var_diag,
                          const VectorXd& eps2, double inv_nu2, const TridiagPrecision& q) {
  const int n = q.n;
  VectorXd shift = VectorXd::Zero(n + 1);
  for (int t = 1; t <= n; ++t)
    shift(t) = 0.5 * eps2(t - 1) * std::exp(-h_mean(t) + 0.5 * h_var_diag(t));
  return SymTridiag::shifted(q, inv_nu2, shift);
}

void update_h(ModelState& state, const Dataset& data, const TridiagPrecision& q) {
  const int n = state.n;
  VectorXd eps2(n);
  for (int t = 1; t <= n; ++t) eps2(t - 1) = expected_sq_residual(state, data, t);

  const double inv_nu2 = state.nu2.mean_inv();
  SymTridiag neg_hess = sv_neg_hessian(state.h_mean, state.h_var_diag, eps2, inv_nu2, q);
  TridiagCholesky chol(neg_hess);
  VectorXd new_diag, new_off;
  chol.inverse_band(new_diag, new_off);

  const VectorXd grad = sv_gradient(state.h_mean, state.h_var_diag, eps2, inv_nu2, q);
  const VectorXd dir = chol.solve(grad);

  const double s_old = sv_objective(state.h_mean, new_diag, new_off, eps2, inv_nu2, q);
  double step = 1.0;
  VectorXd cand = state.h_mean + dir;
  for (int k = 0; k < 20; ++k) {
    if (sv_objective(cand, new_diag, new_off, eps2, inv_nu2, q) >= s_old) break;
    step *= 0.5;
    cand = state.h_mean + step * dir;
  }
  state.h_mean = cand;
  state.h_var_diag = new_diag;
  state.h_var_off = new_off;
  for (int t = 1; t <= n; ++t)
    state.inv_sigma2(t - 1) = std::max(
        lognormal_sigma_moments(state.h_mean(t), state.h_var_diag(t)).mean_inv, 1e-12);
}

BetaMoments beta_moments(const VectorXd& b_mean, const MatrixXd& b_cov,
                         const VectorXd& gamma_prob) {
  const int m = static_cast<int>(b_mean.size());
  if (b_cov.rows() != m || b_cov.cols() != m || gamma_prob.size() != m - 1)
    throw std::invalid_argument("beta_moments: dimension mismatch");
  VectorXd g(m), w(m);
  g(0) = 1.0;
  w(0) = 0.0;  // index 0 carries no selection indicator, so no Bernoulli variance
  for (int t = 1; t < m; ++t) {
    g(t) = gamma_prob(t - 1);
    w(t) = g(t) * (1.0 - g(t));
  }
  BetaMoments out;
  out.mean = g.cwiseProduct(b_mean);
  out.cov.resize(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out.cov(i, j) = g(i) * g(j) * b_cov(i, j);
  for (int i = 0; i < m; ++i)
    out.cov(i, i) += w(i) * (b_cov(i, i) + b_mean(i) * b_mean(i));
  return out;
}

void beta_marginals(const PredictorQ& pq, VectorXd& mean, VectorXd& var) {
  const int m = static_cast<int>(pq.b_mean.size());
  mean.resize(m);
  var.resize(m);
  mean(0) = pq.b_mean(0);
  var(0) = pq.b_var_diag(0);
  for (int t = 1; t < m; ++t) {
    const double g = pq.gamma_prob(t - 1);
    const double w = g * (1.0 - g);
    mean(t) = g * pq.b_mean(t);
    var(t) = (g * g + w) * pq.b_var_diag(t) + w * pq.b_mean(t) * pq.b_mean(t);
  }
}

MatrixXd dense_b_cov(const ModelState& state, const Dataset& data, int j,
                     const TridiagPrecision& q, int max_dim) {
  const PredictorQ& pq = state.pred[j];
  const int n = state.n;
  VectorXd shift = VectorXd::Zero(n + 1);
  for (int i = 0; i < n; ++i) {
    const double x = data.X(i, j);
    shift(i + 1) = state.inv_sigma2(i) * pq.gamma_prob(i) * x * x;
  }
  TridiagCholesky chol(SymTridiag::shifted(q, pq.eta2.mean_inv(), shift));
  return chol.inverse_dense(max_dim);
}

}  // namespace dynsparse
