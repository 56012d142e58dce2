#include "cavi.hpp"

#include <algorithm>
#include <cmath>

namespace dynsparse {

bool prune_check(const PredictorQ& pq, const VectorXd& prev_omega_var_diag,
                 const VectorXd& prev_omega_var_off, double prune_eps) {
  if (pq.gamma_prob.maxCoeff() >= prune_eps) return false;
  for (int i = 0; i < pq.omega_var_diag.size(); ++i)
    if (pq.omega_var_diag(i) < prev_omega_var_diag(i)) return false;
  for (int i = 0; i < pq.omega_var_off.size(); ++i)
    if (pq.omega_var_off(i) < prev_omega_var_off(i)) return false;
  return true;
}

VectorXd precision_inverse_diag(const TridiagPrecision& q) {
  TridiagCholesky chol(SymTridiag::from_precision(q));
  VectorXd diag, off;
  chol.inverse_band(diag, off);
  return diag;
}

double approx_gamma_update(const ModelState& state, const Dataset& data, int j, int t,
                           const VectorXd& q_inv_diag) {
  const PredictorQ& pq = state.pred[j];
  const double x = data.X(t - 1, j);
  const double logit = pq.omega_mean(t) - 0.5 * state.inv_sigma2(t - 1) * x * x *
                                              q_inv_diag(t) / pq.eta2.mean_inv();
  return expit(logit);
}

namespace {

VectorXd fitted_values(const ModelState& state, const Dataset& data) {
  const int n = state.n;
  VectorXd fitted = VectorXd::Zero(n);
  for (int k = 0; k < state.p(); ++k) {
    const PredictorQ& pq = state.pred[k];
    if (!pq.active) continue;
    for (int i = 0; i < n; ++i)
      fitted(i) += data.X(i, k) * pq.gamma_prob(i) * pq.b_mean(i + 1);
  }
  return fitted;
}

}  // namespace

FitResult fit(const Dataset& data, const Hyperparams& hp, const FitOptions& opts,
              const SweepObserver& observer) {
  data.validate();
  hp.validate();
  const int n = data.n();
  const int p = data.p();
  const TridiagPrecision q = build_precision(n, hp.k0);

  FitResult res;
  res.state = init_state(data, hp, opts.heteroskedastic);
  ModelState& st = res.state;

  SplineBasis basis;
  if (opts.smooth) {
    const int knots = std::max(1, std::min(opts.spline_knots, n - opts.spline_degree - 1));
    basis = bspline_basis(n, knots, opts.spline_degree);
  }

  std::vector<VectorXd> prev_b(p), prev_gamma(p), prev_om_diag(p), prev_om_off(p);
  for (int j = 0; j < p; ++j) {
    prev_b[j] = st.pred[j].b_mean;
    prev_gamma[j] = st.pred[j].gamma_prob;
  }

  for (int iter = 1; iter <= hp.max_iter; ++iter) {
    VectorXd fitted = fitted_values(st, data);
    for (int j = 0; j < p; ++j) {
      PredictorQ& pq = st.pred[j];
      if (!pq.active) continue;
      prev_om_diag[j] = pq.omega_var_diag;
      prev_om_off[j] = pq.omega_var_off;

      // Partial residuals against the running fit, with predictor j removed.
      VectorXd resid(n + 1);
      resid(0) = 0.0;
      VectorXd old_contrib(n);
      for (int i = 0; i < n; ++i) {
        old_contrib(i) = data.X(i, j) * pq.gamma_prob(i) * pq.b_mean(i + 1);
        resid(i + 1) = data.y(i) - fitted(i) + old_contrib(i);
      }

      try {
        update_b(st, data, j, q, resid);
        const double quad_b =
            quad_form_expectation(pq.b_mean, pq.b_var_diag, pq.b_var_off, q);
        IgUpdate eta = update_variance_ig(hp.a_eta, hp.b_eta, quad_b, n);
        pq.eta2 = {eta.a_post, eta.b_post};

        update_omega(st, j, q);
        const double quad_om =
            quad_form_expectation(pq.omega_mean, pq.omega_var_diag, pq.omega_var_off, q);
        IgUpdate xi = update_variance_ig(hp.a_xi, hp.b_xi, quad_om, n);
        pq.xi2 = {xi.a_post, xi.b_post};

        for (int t = 1; t <= n; ++t) {
          update_z(st, j, t);
          update_gamma(st, data, j, t, resid);
        }
        if (opts.smooth) pq.gamma_prob = fit_smooth_gamma(pq.gamma_logit, basis).probs;
      } catch (const numeric_error& e) {
        throw numeric_error("sweep " + std::to_string(iter) + ": " + e.what(), j);
      }

      for (int i = 0; i < n; ++i)
        fitted(i) += data.X(i, j) * pq.gamma_prob(i) * pq.b_mean(i + 1) - old_contrib(i);
    }

    if (opts.heteroskedastic) {
      update_h(st, data, q);
      const double quad_h = quad_form_expectation(st.h_mean, st.h_var_diag, st.h_var_off, q);
      IgUpdate nu = update_variance_ig(hp.a_nu, hp.b_nu, quad_h, n);
      st.nu2 = {nu.a_post, nu.b_post};
    } else {
      update_sigma2_homo(st, data, hp);
    }

    double delta = 0.0;
    for (int j = 0; j < p; ++j) {
      const PredictorQ& pq = st.pred[j];
      if (!pq.active) continue;
      delta = std::max(delta, (pq.b_mean - prev_b[j]).cwiseAbs().maxCoeff());
      delta = std::max(delta, (pq.gamma_prob - prev_gamma[j]).cwiseAbs().maxCoeff());
      prev_b[j] = pq.b_mean;
      prev_gamma[j] = pq.gamma_prob;
    }
    res.trace.push_back(delta);
    res.iterations = iter;
    if (observer) observer(st, iter);

    if (opts.prune && iter >= 2) {
      for (int j = 0; j < p; ++j) {
        PredictorQ& pq = st.pred[j];
        if (!pq.active) continue;
        if (prune_check(pq, prev_om_diag[j], prev_om_off[j], hp.prune_eps)) {
          pq.active = false;
          pq.dropped_at = iter;
          pq.gamma_prob.setZero();
          pq.gamma_logit.setZero();
          pq.b_mean.setZero();
          res.dropped.push_back({j, iter});
        }
      }
    }

    if (delta < hp.tol) {
      res.converged = iter >= 2;
      break;
    }
  }
  return res;
}

}  // namespace dynsparse
