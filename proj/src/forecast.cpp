#include "forecast.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace dynsparse {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double gaussian_log_score(double y, double mean, double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("log score needs variance > 0");
  const double z = y - mean;
  return -0.5 * std::log(2.0 * kPi * variance) - 0.5 * z * z / variance;
}

Predictive predictive_density(const ModelState& state, const VectorXd& x_next,
                              int horizon) {
  if (state.n < 1 || state.p() < 1)
    throw std::invalid_argument("predictive_density: state has not been fitted");
  if (x_next.size() != state.p())
    throw std::invalid_argument("predictive_density: predictor dimension mismatch");
  if (horizon < 1) throw std::invalid_argument("predictive_density: horizon must be >= 1");
  const int n = state.n;

  double sigma2_next;
  if (state.heteroskedastic) {
    const double var_h = state.h_var_diag(n) + horizon * state.nu2.mean();
    sigma2_next = lognormal_sigma_moments(state.h_mean(n), var_h).mean;
  } else {
    sigma2_next = state.sigma2.mean();
  }

  double mean = 0.0;
  double var = sigma2_next;
  for (int j = 0; j < state.p(); ++j) {
    const PredictorQ& pq = state.pred[j];
    if (!pq.active) continue;
    const double x = x_next(j);
    const double pj = expit(pq.omega_mean(n));
    const double mb = pq.b_mean(n);
    const double vb = pq.b_var_diag(n) + horizon * pq.eta2.mean();
    mean += x * pj * mb;
    var += x * x * (pj * (vb + mb * mb) - pj * pj * mb * mb);
  }
  return {mean, var};
}

double rmsfe(const std::vector<double>& errors_model,
             const std::vector<double>& errors_bench) {
  if (errors_model.size() != errors_bench.size())
    throw std::invalid_argument("rmsfe: length mismatch");
  double sm = 0.0, sb = 0.0;
  for (double e : errors_model) sm += e * e;
  for (double e : errors_bench) sb += e * e;
  return sm - sb;
}

double rmae(const std::vector<double>& errors_model,
            const std::vector<double>& errors_bench) {
  if (errors_model.size() != errors_bench.size())
    throw std::invalid_argument("rmae: length mismatch");
  double sm = 0.0, sb = 0.0;
  for (double e : errors_model) sm += std::abs(e);
  for (double e : errors_bench) sb += std::abs(e);
  return sm - sb;
}

double als(const std::vector<double>& logscores_model,
           const std::vector<double>& logscores_bench) {
  if (logscores_model.size() != logscores_bench.size() || logscores_model.empty())
    throw std::invalid_argument("als: length mismatch");
  double s = 0.0;
  for (size_t i = 0; i < logscores_model.size(); ++i)
    s += logscores_model[i] - logscores_bench[i];
  return s / static_cast<double>(logscores_model.size());
}

DmResult dm_test(const std::vector<double>& errors_a, const std::vector<double>& errors_b,
                 DmLoss loss, int horizon) {
  if (errors_a.size() != errors_b.size())
    throw std::invalid_argument("dm_test: length mismatch");
  const int m = static_cast<int>(errors_a.size());
  if (m < 10) throw std::invalid_argument("dm_test: need at least 10 observations");
  if (horizon < 1) throw std::invalid_argument("dm_test: horizon must be >= 1");

  std::vector<double> d(m);
  for (int i = 0; i < m; ++i) {
    const double la = loss == DmLoss::Squared ? errors_a[i] * errors_a[i]
                                              : std::abs(errors_a[i]);
    const double lb = loss == DmLoss::Squared ? errors_b[i] * errors_b[i]
                                              : std::abs(errors_b[i]);
    d[i] = la - lb;
  }
  double dbar = 0.0;
  for (double v : d) dbar += v;
  dbar /= m;

  auto autocov = [&](int lag) {
    double s = 0.0;
    for (int i = lag; i < m; ++i) s += (d[i] - dbar) * (d[i - lag] - dbar);
    return s / m;
  };
  double lrv = autocov(0);
  for (int l = 1; l < horizon; ++l)
    lrv += 2.0 * (1.0 - static_cast<double>(l) / horizon) * autocov(l);

  if (!(lrv > 0.0)) return {0.0, 1.0};
  const double stat = dbar / std::sqrt(lrv / m);
  const double p = std::erfc(std::abs(stat) / std::sqrt(2.0));
  return {stat, p};
}

OosScheme parse_scheme(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("scheme must look like expanding:240 or rolling:120");
  const std::string kind = text.substr(0, colon);
  const int w = std::stoi(text.substr(colon + 1));
  OosScheme s;
  s.window = w;
  if (kind == "expanding")
    s.kind = OosScheme::Expanding;
  else if (kind == "rolling")
    s.kind = OosScheme::Rolling;
  else
    throw std::invalid_argument("unknown scheme kind: " + kind);
  if (w < 2) throw std::invalid_argument("scheme window must be >= 2");
  return s;
}

namespace {

struct Origins {
  int first = 0;  // 1-based origin index
  int last = 0;
};

Origins origin_range(int n, const OosScheme& scheme, int horizon) {
  Origins o;
  o.first = scheme.window;
  o.last = n - horizon;
  if (o.first > o.last)
    throw std::invalid_argument("out-of-sample window infeasible for this sample size");
  return o;
}

Dataset window_slice(const Dataset& data, const OosScheme& scheme, int origin) {
  const int lo = scheme.kind == OosScheme::Rolling ? origin - scheme.window : 0;
  const int len = origin - lo;
  Dataset sub;
  sub.y = data.y.segment(lo, len);
  sub.X = data.X.middleRows(lo, len);
  sub.names = data.names;
  return sub;
}

ForecastRecord make_record(int origin, double y_true, const Predictive& pd) {
  ForecastRecord rec;
  rec.origin = origin;
  rec.y_true = y_true;
  rec.mean = pd.mean;
  rec.variance = pd.variance;
  rec.log_score = gaussian_log_score(y_true, pd.mean, pd.variance);
  return rec;
}

}  // namespace

std::vector<ForecastRecord> run_oos(const Dataset& data, const Hyperparams& hp,
                                    const FitOptions& opts, const OosScheme& scheme,
                                    int horizon, int nthreads) {
  data.validate();
  const Origins range = origin_range(data.n(), scheme, horizon);
  const int count = range.last - range.first + 1;
  std::vector<ForecastRecord> records(count);

  std::atomic<int> next(0);
  std::exception_ptr first_error = nullptr;
  std::mutex err_mutex;
  auto worker = [&]() {
    for (;;) {
      const int idx = next.fetch_add(1);
      if (idx >= count) return;
      const int origin = range.first + idx;
      try {
        Dataset sub = window_slice(data, scheme, origin);
        FitResult fr = fit(sub, hp, opts);
        const VectorXd x_next = data.X.row(origin + horizon - 1);
        const Predictive pd = predictive_density(fr.state, x_next, horizon);
        records[idx] = make_record(origin, data.y(origin + horizon - 1), pd);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };

  const int workers = std::max(1, std::min(nthreads, count));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return records;
}

std::vector<ForecastRecord> run_oos_benchmark(const Dataset& data, const OosScheme& scheme,
                                              int horizon) {
  data.validate();
  const Origins range = origin_range(data.n(), scheme, horizon);
  std::vector<ForecastRecord> records;
  records.reserve(range.last - range.first + 1);
  for (int origin = range.first; origin <= range.last; ++origin) {
    const int lo = scheme.kind == OosScheme::Rolling ? origin - scheme.window : 0;
    const int len = origin - lo;
    const VectorXd yw = data.y.segment(lo, len);
    const double mean = yw.mean();
    double var = (yw.array() - mean).square().sum() / std::max(1, len - 1);
    var = std::max(var, 1e-12);
    records.push_back(make_record(origin, data.y(origin + horizon - 1), {mean, var}));
  }
  return records;
}

ForecastComparison compare_forecasts(const std::vector<ForecastRecord>& model,
                                     const std::vector<ForecastRecord>& bench,
                                     int horizon) {
  if (model.size() != bench.size() || model.empty())
    throw std::invalid_argument("compare_forecasts: record count mismatch");
  std::vector<double> em, eb, lm, lb;
  em.reserve(model.size());
  eb.reserve(model.size());
  for (size_t i = 0; i < model.size(); ++i) {
    em.push_back(model[i].y_true - model[i].mean);
    eb.push_back(bench[i].y_true - bench[i].mean);
    lm.push_back(model[i].log_score);
    lb.push_back(bench[i].log_score);
  }
  ForecastComparison cmp;
  cmp.rmsfe = rmsfe(em, eb);
  cmp.rmae = rmae(em, eb);
  cmp.als = als(lm, lb);
  cmp.dm_squared = dm_test(em, eb, DmLoss::Squared, horizon);
  cmp.dm_absolute = dm_test(em, eb, DmLoss::Absolute, horizon);
  return cmp;
}

}  // namespace dynsparse
