#include "dynsparse.h"

#include <cctype>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <memory>
#include <fstream>
#include <string>

#include "json.hpp"

#include "cavi.hpp"
#include "csv.hpp"
#include "errors.hpp"
#include "forecast.hpp"
#include "mcmc.hpp"
#include "rng.hpp"
#include "simlab.hpp"
#include "vb.hpp"

namespace ds = dynsparse;

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

// Maps C++ failures onto status codes; every API body runs inside this.
template <typename Fn>
dsp_status guarded(Fn&& fn) {
  try {
    fn();
    return DSP_OK;
  } catch (const ds::io_error& e) {
    set_error(e.what());
    return DSP_ERR_IO;
  } catch (const ds::numeric_error& e) {
    set_error(e.what());
    return DSP_ERR_NUMERIC;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return DSP_ERR_INVALID;
  } catch (const std::exception& e) {
    set_error(e.what());
    return DSP_ERR_INVALID;
  }
}

template <typename Fn>
dsp_status metric_guard(const double* a, const double* b, int n, double* out, Fn&& fn) {
  if (!a || !b || !out) {
    set_error("metric: NULL pointer");
    return DSP_ERR_STATE;
  }
  return guarded([&] {
    const Eigen::VectorXd va = Eigen::Map<const Eigen::VectorXd>(a, n);
    const Eigen::VectorXd vb = Eigen::Map<const Eigen::VectorXd>(b, n);
    *out = fn(va, vb);
  });
}

}  // namespace

struct dsp_dataset {
  ds::Dataset data;
};

struct dsp_options {
  ds::Hyperparams hp;
  ds::FitOptions fit;
  std::uint64_t seed = 42;
};

struct dsp_fit {
  ds::FitResult result;
  std::vector<std::string> names;
  Eigen::MatrixXd coef;       // n x p posterior means of beta
  Eigen::MatrixXd inclusion;  // n x p
  Eigen::VectorXd volatility; // n, E[sigma_t]
};

struct dsp_gibbs {
  ds::GibbsDraws draws;
};

struct dsp_forecasts {
  std::vector<ds::ForecastRecord> records;
};

extern "C" {

const char* dsp_last_error(void) { return g_last_error.c_str(); }

const char* dsp_version(void) { return "0.1.0"; }

dsp_status dsp_dataset_create(int n, int p, const double* y, const double* x,
                              const char* const* names, dsp_dataset** out) {
  if (!y || !x || !out) {
    set_error("dsp_dataset_create: NULL pointer");
    return DSP_ERR_STATE;
  }
  return guarded([&] {
    auto d = std::make_unique<dsp_dataset>();
    d->data.y = Eigen::Map<const Eigen::VectorXd>(y, n);
    d->data.X.resize(n, p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j) d->data.X(i, j) = x[static_cast<size_t>(i) * p + j];
    d->data.names.resize(p);
    for (int j = 0; j < p; ++j)
      d->data.names[j] = names && names[j] ? names[j] : "x" + std::to_string(j + 1);
    d->data.validate();
    *out = d.release();
  });
}

dsp_status dsp_dataset_load_csv(const char* path, const char* target,
                                const char* date_column, int horizon,
                                int log_diff_transform, int standardize,
                                dsp_dataset** out) {
  if (!path || !target || !out) {
    set_error("dsp_dataset_load_csv: NULL pointer");
    return DSP_ERR_STATE;
  }
  return guarded([&] {
    ds::LoadOptions opts;
    opts.target = target;
    opts.date_column = date_column ? date_column : "";
    opts.horizon = horizon;
    opts.log_diff_transform = log_diff_transform != 0;
    opts.standardize = standardize != 0;
    auto d = std::make_unique<dsp_dataset>();
    d->data = ds::load_csv(path, opts);
    d->data.validate();
    *out = d.release();
  });
}

dsp_status dsp_dataset_simulate(const char* patterns, int n, double noise_var,
                                double x_autocorr, uint64_t seed, dsp_dataset** out,
                                double* beta_true, double* gamma_true) {
  if (!patterns || !out) {
    set_error("dsp_dataset_simulate: NULL pointer");
    return DSP_ERR_STATE;
  }
  return guarded([&] {
    std::vector<ds::PatternKind> kinds;
    std::string token;
    for (const char* c = patterns;; ++c) {
      if (*c == ',' || *c == '\0') {
        if (!token.empty()) {
          const auto kind = ds::pattern_from_name(token);
          if (!kind) throw std::invalid_argument("unknown pattern: " + token);
          kinds.push_back(*kind);
          token.clear();
        }
        if (*c == '\0') break;
      } else if (!std::isspace(static_cast<unsigned char>(*c))) {
        token.push_back(*c);
      }
    }
    if (kinds.empty()) throw std::invalid_argument("no patterns given");

    std::mt19937_64 rng = ds::make_rng(seed, "simulate");
    std::vector<ds::CoefPattern> pats;
    pats.reserve(kinds.size());
    for (const auto kind : kinds) pats.push_back(ds::gen_pattern(kind, n, rng));
    ds::GenOptions gopts;
    gopts.noise_var = noise_var;
    gopts.x_autocorr = x_autocorr;
    auto [data, truth] = ds::gen_dataset(pats, rng, gopts);
    const int p = static_cast<int>(kinds.size());
    if (beta_true)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j)
          beta_true[static_cast<size_t>(i) * p + j] = truth.beta(i, j);
    if (gamma_true)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j)
          gamma_true[static_cast<size_t>(i) * p + j] = truth.gamma_true(i, j);
    auto d = std::make_unique<dsp_dataset>();
    d->data = std::move(data);
    *out = d.release();
  });
}

void dsp_dataset_free(dsp_dataset* d) { delete d; }

int dsp_dataset_rows(const dsp_dataset* d) { return d ? d->data.n() : 0; }

int dsp_dataset_cols(const dsp_dataset* d) { return d ? d->data.p() : 0; }

const char* dsp_dataset_name(const dsp_dataset* d, int j) {
  if (!d || j < 0 || j >= d->data.p()) return nullptr;
  return d->data.names[j].c_str();
}

dsp_options* dsp_options_create(void) { return new dsp_options(); }

void dsp_options_free(dsp_options* o) { delete o; }

namespace {

double* option_slot(dsp_options* o, const std::string& key, bool*& flag, int*& iptr) {
  flag = nullptr;
  iptr = nullptr;
  if (key == "a_sigma") return &o->hp.a_sigma;
  if (key == "b_sigma") return &o->hp.b_sigma;
  if (key == "a_eta") return &o->hp.a_eta;
  if (key == "b_eta") return &o->hp.b_eta;
  if (key == "a_xi") return &o->hp.a_xi;
  if (key == "b_xi") return &o->hp.b_xi;
  if (key == "a_nu") return &o->hp.a_nu;
  if (key == "b_nu") return &o->hp.b_nu;
  if (key == "k0") return &o->hp.k0;
  if (key == "prune_eps") return &o->hp.prune_eps;
  if (key == "tol") return &o->hp.tol;
  if (key == "max_iter") {
    iptr = &o->hp.max_iter;
    return nullptr;
  }
  if (key == "spline_knots") {
    iptr = &o->fit.spline_knots;
    return nullptr;
  }
  if (key == "spline_degree") {
    iptr = &o->fit.spline_degree;
    return nullptr;
  }
  if (key == "smooth") {
    flag = &o->fit.smooth;
    return nullptr;
  }
  if (key == "heteroskedastic") {
    flag = &o->fit.heteroskedastic;
    return nullptr;
  }
  if (key == "prune") {
    flag = &o->fit.prune;
    return nullptr;
  }
  return nullptr;
}

}  // namespace

dsp_status dsp_options_set(dsp_options* o, const char* key, double value) {
  if (!o || !key) {
    set_error("dsp_options_set: NULL pointer");
    return DSP_ERR_STATE;
  }
  return guarded([&] {
    const std::string k = key;
    if (k == "seed") {
      o->seed = static_cast<std::uint64_t>(value);
      return;
    }
    bool* flag;
    int* iptr;
    double* slot = option_slot(o, k, flag, iptr);
    if (flag)
      *flag = value != 0.0;
    else if (iptr)
      *iptr = static_cast<int>(value);
    else if (slot)
      *slot = value;
    else
      throw std::invalid_argument("unknown option: " + k);
  });
}

dsp_status dsp_options_get(const dsp_options* o, const char* key, double* value) {
  if (!o || !key || !value) {
    set_error("dsp_options_get: NULL pointer");
    return DSP_ERR_STATE;
  }
  return guarded([&] {
    const std::string k = key;
    if (k == "seed") {
      *value = static_cast<double>(o->seed);
      return;
    }
    bool* flag;
    int* iptr;
    double* slot = option_slot(const_cast<dsp_options*>(o), k, flag, iptr);
    if (flag)
      *value = *flag ? 1.0 : 0.0;
    else if (iptr)
      *value = *iptr;
    else if (slot)
      *value = *slot;
    else
      throw std::invalid_argument("unknown option: " + k);
  });
}

namespace {

double expected_sigma(const ds::ModelState& st, int t) {
  if (st.heteroskedastic)
    return std::exp(0.5 * st.h_mean(t) + 0.125 * st.h_var_diag(t));
  const double a = st.sigma2.a, b = st.sigma2.b;
  if (a > 0.5) return std::sqrt(b) * std::exp(std::lgamma(a - 0.5) - std::lgamma(a));
  return std::sqrt(st.sigma2.mean());
}

}  // namespace

dsp_status dsp_fit_run(const dsp_dataset* d, const dsp_options* o, dsp_fit** out) {
  if (!d || !o || !out) {
    set_error("dsp_fit_run: NULL pointer");
    return DSP_ERR_STATE;
  }
  return guarded([&] {
    auto f = std::make_unique<dsp_fit>();
    f->result = ds::fit(d->data, o->hp, o->fit);
    f->names = d->data.names;
    const int n = d->data.n();
    const int p = d->data.p();
    f->coef.resize(n, p);
    f->inclusion.resize(n, p);
    f->volatility.resize(n);
    for (int j = 0; j < p; ++j) {
      Eigen::VectorXd mean, var;
      ds::beta_marginals(f->result.state.pred[j], mean, var);
      for (int t = 1; t <= n; ++t) {
        f->coef(t - 1, j) = mean(t);
        f->inclusion(t - 1, j) = f->result.state.pred[j].gamma_prob(t - 1);
      }
    }
    for (int t = 1; t <= n; ++t) f->volatility(t - 1) = expected_sigma(f->result.state, t);
    *out = f.release();
  });
}

void dsp_fit_free(dsp_fit* f) { delete f; }

int dsp_fit_iterations(const dsp_fit* f) { return f ? f->result.iterations : 0; }

int dsp_fit_converged(const dsp_fit* f) { return f && f->result.converged ? 1 : 0; }

namespace {
dsp_status copy_matrix(const Eigen::MatrixXd* m, double* out) {
  if (!m || !out) {
    set_error("fit getter: NULL pointer");
    return DSP_ERR_STATE;
  }
  for (int i = 0; i < m->rows(); ++i)
    for (int j = 0; j < m->cols(); ++j)
      out[static_cast<size_t>(i) * m->cols() + j] = (*m)(i, j);
  return DSP_OK;
}
}  // namespace

dsp_status dsp_fit_coefficients(const dsp_fit* f, double* out) {
  return copy_matrix(f ? &f->coef : nullptr, out);
}

dsp_status dsp_fit_inclusion(const dsp_fit* f, double* out) {
  return copy_matrix(f ? &f->inclusion : nullptr, out);
}

dsp_status dsp_fit_volatility(const dsp_fit* f, double* out) {
  if (!f || !out) {
    set_error("dsp_fit_volatility: NULL pointer");
    return DSP_ERR_STATE;
  }
  for (int i = 0; i < f->volatility.size(); ++i) out[i] = f->volatility(i);
  return DSP_OK;
}

dsp_status dsp_fit_dropped(const dsp_fit* f, int* out) {
  if (!f || !out) {
    set_error("dsp_fit_dropped: NULL pointer");
    return DSP_ERR_STATE;
  }
  for (int j = 0; j < f->result.state.p(); ++j)
    out[j] = f->result.state.pred[j].dropped_at;
  return DSP_OK;
}

dsp_status dsp_fit_predict(const dsp_fit* f, const double* x_next, int horizon,
                           double* mean, double* variance) {
  if (!f || !x_next || !mean || !variance) {
    set_error("dsp_fit_predict: NULL pointer");
    return DSP_ERR_STATE;
  }
  return guarded([&] {
    const Eigen::Map<const Eigen::VectorXd> x(x_next, f->result.state.p());
    const ds::Predictive pd = ds::predictive_density(f->result.state, x, horizon);
    *mean = pd.mean;
    *variance = pd.variance;
  });
}

dsp_status dsp_fit_write_outputs(const dsp_fit* f, const char* out_dir) {
  if (!f || !out_dir) {
    set_error("dsp_fit_write_outputs: NULL pointer");
    return DSP_ERR_STATE;
  }
  return guarded([&] {
    const std::filesystem::path dir(out_dir);
    if (!std::filesystem::is_directory(dir))
      throw ds::io_error("output directory does not exist: " + std::string(out_dir));
    ds::write_matrix_csv((dir / "coefficients.csv").string(), f->coef, f->names);
    ds::write_matrix_csv((dir / "inclusion.csv").string(), f->inclusion, f->names);
    ds::write_matrix_csv((dir / "volatility.csv").string(), f->volatility,
                         {"expected_sigma"});
    nlohmann::json dropped = nlohmann::json::array();
    for (const auto& ev : f->result.dropped)
      dropped.push_back({{"predictor", ev.predictor},
                         {"name", f->names[ev.predictor]},
                         {"iteration", ev.iteration}});
    nlohmann::json doc;
    doc["dropped"] = dropped;
    doc["iterations"] = f->result.iterations;
    doc["converged"] = f->result.converged;
    std::ofstream js(dir / "dropped.json");
    if (!js) throw ds::io_error("cannot write dropped.json");
    js << doc.dump(2) << '\n';
  });
}

dsp_status dsp_gibbs_run(const dsp_dataset* d, const dsp_options* o, int draws, int burnin,
                         uint64_t seed, dsp_gibbs** out) {
  if (!d || !o || !out) {
    set_error("dsp_gibbs_run: NULL pointer");
    return DSP_ERR_STATE;
  }
  return guarded([&] {
    auto g = std::make_unique<dsp_gibbs>();
    g->draws = ds::run_gibbs(d->data, o->hp, draws, burnin, seed);
    *out = g.release();
  });
}

void dsp_gibbs_free(dsp_gibbs* g) { delete g; }

int dsp_gibbs_ndraws(const dsp_gibbs* g) { return g ? g->draws.ndraws : 0; }

dsp_status dsp_gibbs_export_csv(const dsp_gibbs* g, const char* what, int predictor,
                                const char* path) {
  if (!g || !what || !path) {
    set_error("dsp_gibbs_export_csv: NULL pointer");
    return DSP_ERR_STATE;
  }
  return guarded([&] {
    const std::string w = what;
    const ds::GibbsDraws& dr = g->draws;
    auto check_j = [&] {
      if (predictor < 0 || predictor >= dr.p)
        throw std::invalid_argument("predictor index out of range");
    };
    Eigen::MatrixXd values;
    std::vector<std::string> cols;
    if (w == "b" || w == "omega") {
      check_j();
      values = (w == "b") ? dr.b[predictor] : dr.omega[predictor];
      for (int t = 0; t <= dr.n; ++t) cols.push_back("t" + std::to_string(t));
    } else if (w == "gamma" || w == "z") {
      check_j();
      values = (w == "gamma") ? dr.gamma[predictor] : dr.z[predictor];
      for (int t = 1; t <= dr.n; ++t) cols.push_back("t" + std::to_string(t));
    } else if (w == "eta2" || w == "xi2") {
      values = (w == "eta2") ? dr.eta2 : dr.xi2;
      for (int j = 1; j <= dr.p; ++j) cols.push_back("x" + std::to_string(j));
    } else if (w == "sigma2") {
      values = dr.sigma2;
      cols = {"sigma2"};
    } else {
      throw std::invalid_argument("unknown draw family: " + w);
    }
    ds::write_matrix_csv(path, values, cols, "draw", 1);
  });
}

dsp_status dsp_overlap(const dsp_fit* f, const dsp_gibbs* g, const char* what,
                       int predictor, int t, double* out_pct) {
  if (!f || !g || !what || !out_pct) {
    set_error("dsp_overlap: NULL pointer");
    return DSP_ERR_STATE;
  }
  return guarded([&] {
    const ds::GibbsDraws& dr = g->draws;
    const ds::ModelState& st = f->result.state;
    if (predictor < 0 || predictor >= st.p() || dr.p != st.p())
      throw std::invalid_argument("predictor index out of range");
    if (t < 1 || t > st.n) throw std::invalid_argument("time index out of range");
    const ds::PredictorQ& pq = st.pred[predictor];
    const std::string w = what;
    if (w == "b") {
      *out_pct = ds::overlap_gaussian(pq.b_mean(t), pq.b_var_diag(t),
                                      dr.b[predictor].col(t));
    } else if (w == "gamma") {
      *out_pct = ds::overlap_bernoulli(pq.gamma_prob(t - 1),
                                       dr.gamma[predictor].col(t - 1));
    } else if (w == "beta") {
      const Eigen::VectorXd beta_draws =
          dr.gamma[predictor].col(t - 1).cwiseProduct(dr.b[predictor].col(t));
      *out_pct = ds::overlap_beta_mixture(pq.gamma_prob(t - 1), pq.b_mean(t),
                                          pq.b_var_diag(t), beta_draws);
    } else {
      throw std::invalid_argument("unknown overlap family: " + w);
    }
  });
}

dsp_status dsp_forecast_run(const dsp_dataset* d, const dsp_options* o, const char* scheme,
                            int horizon, int nthreads, dsp_forecasts** out) {
  if (!d || !o || !scheme || !out) {
    set_error("dsp_forecast_run: NULL pointer");
    return DSP_ERR_STATE;
  }
  return guarded([&] {
    auto fc = std::make_unique<dsp_forecasts>();
    fc->records = ds::run_oos(d->data, o->hp, o->fit, ds::parse_scheme(scheme), horizon,
                              std::max(1, nthreads));
    *out = fc.release();
  });
}

dsp_status dsp_forecast_benchmark(const dsp_dataset* d, const char* scheme, int horizon,
                                  dsp_forecasts** out) {
  if (!d || !scheme || !out) {
    set_error("dsp_forecast_benchmark: NULL pointer");
    return DSP_ERR_STATE;
  }
  return guarded([&] {
    auto fc = std::make_unique<dsp_forecasts>();
    fc->records = ds::run_oos_benchmark(d->data, ds::parse_scheme(scheme), horizon);
    *out = fc.release();
  });
}

void dsp_forecasts_free(dsp_forecasts* f) { delete f; }

int dsp_forecasts_count(const dsp_forecasts* f) {
  return f ? static_cast<int>(f->records.size()) : 0;
}

dsp_status dsp_forecasts_record(const dsp_forecasts* f, int i, int* origin, double* y_true,
                                double* mean, double* variance, double* log_score) {
  if (!f) {
    set_error("dsp_forecasts_record: NULL handle");
    return DSP_ERR_STATE;
  }
  if (i < 0 || i >= static_cast<int>(f->records.size())) {
    set_error("dsp_forecasts_record: index out of range");
    return DSP_ERR_INVALID;
  }
  const ds::ForecastRecord& r = f->records[i];
  if (origin) *origin = r.origin;
  if (y_true) *y_true = r.y_true;
  if (mean) *mean = r.mean;
  if (variance) *variance = r.variance;
  if (log_score) *log_score = r.log_score;
  return DSP_OK;
}

dsp_status dsp_forecasts_compare(const dsp_forecasts* model, const dsp_forecasts* bench,
                                 int horizon, double* rmsfe, double* rmae, double* als,
                                 double* dm_sq_stat, double* dm_sq_p, double* dm_abs_stat,
                                 double* dm_abs_p) {
  if (!model || !bench) {
    set_error("dsp_forecasts_compare: NULL handle");
    return DSP_ERR_STATE;
  }
  return guarded([&] {
    const ds::ForecastComparison cmp =
        ds::compare_forecasts(model->records, bench->records, horizon);
    if (rmsfe) *rmsfe = cmp.rmsfe;
    if (rmae) *rmae = cmp.rmae;
    if (als) *als = cmp.als;
    if (dm_sq_stat) *dm_sq_stat = cmp.dm_squared.statistic;
    if (dm_sq_p) *dm_sq_p = cmp.dm_squared.p_value;
    if (dm_abs_stat) *dm_abs_stat = cmp.dm_absolute.statistic;
    if (dm_abs_p) *dm_abs_p = cmp.dm_absolute.p_value;
  });
}

dsp_status dsp_metric_f1(const double* gamma_hat, const double* gamma_true, int n,
                         double threshold, double* out) {
  return metric_guard(gamma_hat, gamma_true, n, out,
                      [&](const auto& a, const auto& b) { return ds::f1_score(a, b, threshold); });
}

dsp_status dsp_metric_accuracy(const double* gamma_hat, const double* gamma_true, int n,
                               double threshold, double* out) {
  return metric_guard(gamma_hat, gamma_true, n, out, [&](const auto& a, const auto& b) {
    return ds::classification_accuracy(a, b, threshold);
  });
}

dsp_status dsp_metric_mse(const double* beta_hat, const double* beta_true, int n,
                          double* out) {
  return metric_guard(beta_hat, beta_true, n, out,
                      [&](const auto& a, const auto& b) { return ds::mse_path(a, b); });
}

}  // extern "C"
