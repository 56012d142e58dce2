// dynsparse command-line front end. Numerics live behind the C API in
// libdynsparse; this binary only parses arguments, orchestrates runs and
// writes files.
#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dynsparse.h"

namespace fs = std::filesystem;
using nlohmann::json;

#ifndef DYNSPARSE_GIT_HASH
#define DYNSPARSE_GIT_HASH "unknown"
#endif

namespace {

[[noreturn]] void die(const std::string& where) {
  std::cerr << "error: " << where << ": " << dsp_last_error() << "\n";
  std::exit(1);
}

void check(dsp_status st, const std::string& where) {
  if (st != DSP_OK) die(where);
}

int env_threads() {
  if (const char* env = std::getenv("DYNSPARSE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Minimal key = value config reader ('#' comments, optional [section]
// headers). Returns section -> key -> raw value.
std::map<std::string, std::map<std::string, std::string>> read_config(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open config file " << path << "\n";
    std::exit(1);
  }
  std::map<std::string, std::map<std::string, std::string>> out;
  std::string section, line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: " << path << ":" << line_no << ": expected key = value\n";
      std::exit(1);
    }
    out[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 42;
  int threads = env_threads();
  std::vector<std::string> hyper_overrides;  // key=value pairs from --set
};

// Option keys honored in config files and --set flags.
const std::vector<std::string> kOptionKeys = {
    "a_sigma", "b_sigma", "a_eta",        "b_eta",           "a_xi",
    "b_xi",    "a_nu",    "b_nu",         "k0",              "prune_eps",
    "tol",     "max_iter", "smooth",      "heteroskedastic", "prune",
    "spline_knots", "spline_degree"};

void apply_option(dsp_options* opts, const std::string& key, const std::string& value,
                  json& manifest_options) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    std::cerr << "error: option " << key << " expects a number, got '" << value << "'\n";
    std::exit(1);
  }
  check(dsp_options_set(opts, key.c_str(), v), "set option " + key);
  manifest_options[key] = v;
}

void apply_config_and_overrides(dsp_options* opts, const CommonArgs& common,
                                json& manifest_options) {
  if (!common.config_path.empty()) {
    const auto cfg = read_config(common.config_path);
    for (const auto& [section, kv] : cfg) {
      if (!section.empty() && section != "options") continue;
      for (const auto& [key, value] : kv) apply_option(opts, key, value, manifest_options);
    }
  }
  for (const auto& pair : common.hyper_overrides) {  // flags win over the file
    const auto eq = pair.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: --set expects key=value, got '" << pair << "'\n";
      std::exit(1);
    }
    apply_option(opts, pair.substr(0, eq), pair.substr(eq + 1), manifest_options);
  }
}

void write_manifest(const fs::path& dir, const std::string& command, const json& config) {
  json doc;
  doc["tool"] = "dynsparse";
  doc["version"] = dsp_version();
  doc["git_hash"] = DYNSPARSE_GIT_HASH;
  doc["command"] = command;
  doc["config"] = config;
  std::ofstream out(dir / "manifest.json");
  out << doc.dump(2) << '\n';
}

fs::path prepare_out_dir(const std::string& out) {
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) {
    std::cerr << "error: cannot create output directory " << out << "\n";
    std::exit(1);
  }
  return dir;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const size_t m = xs.size() / 2;
  return xs.size() % 2 == 1 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

struct DatasetArgs {
  std::string input;
  std::string target;
  std::string date_col;
  int horizon = 1;
  bool transform = false;
  bool standardize = false;
};

dsp_dataset* load_dataset(const DatasetArgs& a) {
  dsp_dataset* d = nullptr;
  check(dsp_dataset_load_csv(a.input.c_str(), a.target.c_str(),
                             a.date_col.empty() ? nullptr : a.date_col.c_str(), a.horizon,
                             a.transform ? 1 : 0, a.standardize ? 1 : 0, &d),
        "load " + a.input);
  return d;
}

json dataset_manifest(const DatasetArgs& a) {
  json j;
  j["input"] = a.input;
  j["target"] = a.target;
  if (!a.date_col.empty()) j["date_column"] = a.date_col;
  j["horizon"] = a.horizon;
  j["transform"] = a.transform;
  j["standardize"] = a.standardize;
  return j;
}

void write_forecast_csv(const fs::path& path, dsp_forecasts* fc) {
  std::ofstream out(path);
  out << "origin,y_true,mean,variance,log_score\n";
  for (int i = 0; i < dsp_forecasts_count(fc); ++i) {
    int origin;
    double y_true, mean, variance, log_score;
    check(dsp_forecasts_record(fc, i, &origin, &y_true, &mean, &variance, &log_score),
          "read forecast record");
    out << origin << ',' << fmt17(y_true) << ',' << fmt17(mean) << ',' << fmt17(variance)
        << ',' << fmt17(log_score) << '\n';
  }
}

// ---------------- fit ----------------

int cmd_fit(const CommonArgs& common, const DatasetArgs& data_args, bool smooth,
            bool homoskedastic, bool no_prune) {
  dsp_options* opts = dsp_options_create();
  json manifest_opts;
  // defaults: stochastic volatility on, pruning on
  dsp_options_set(opts, "heteroskedastic", homoskedastic ? 0.0 : 1.0);
  dsp_options_set(opts, "smooth", smooth ? 1.0 : 0.0);
  dsp_options_set(opts, "prune", no_prune ? 0.0 : 1.0);
  apply_config_and_overrides(opts, common, manifest_opts);
  manifest_opts["heteroskedastic"] = !homoskedastic;
  manifest_opts["smooth"] = smooth;
  manifest_opts["prune"] = !no_prune;
  manifest_opts["seed"] = common.seed;

  dsp_dataset* d = load_dataset(data_args);
  dsp_fit* f = nullptr;
  check(dsp_fit_run(d, opts, &f), "fit");

  const fs::path dir = prepare_out_dir(common.out_dir);
  check(dsp_fit_write_outputs(f, dir.string().c_str()), "write outputs");
  json cfg = dataset_manifest(data_args);
  cfg["options"] = manifest_opts;
  cfg["iterations"] = dsp_fit_iterations(f);
  cfg["converged"] = dsp_fit_converged(f) != 0;
  write_manifest(dir, "fit", cfg);

  std::cout << "fit: " << dsp_fit_iterations(f) << " sweeps, "
            << (dsp_fit_converged(f) ? "converged" : "max-iter") << ", outputs in "
            << dir.string() << "\n";
  dsp_fit_free(f);
  dsp_dataset_free(d);
  dsp_options_free(opts);
  return 0;
}

// ---------------- simulate ----------------

struct SimSpec {
  int n = 200;
  double noise_var = 0.25;
  double x_autocorr = 0.0;
  std::vector<std::string> patterns;  // one entry per predictor
};

SimSpec read_sim_spec(const std::string& path) {
  SimSpec spec;
  const auto cfg = read_config(path);
  const auto top = cfg.find("");
  if (top != cfg.end()) {
    for (const auto& [key, value] : top->second) {
      if (key == "n")
        spec.n = std::atoi(value.c_str());
      else if (key == "noise_var")
        spec.noise_var = std::atof(value.c_str());
      else if (key == "x_autocorr")
        spec.x_autocorr = std::atof(value.c_str());
      else {
        std::cerr << "error: unknown simulation key '" << key << "'\n";
        std::exit(1);
      }
    }
  }
  const auto pats = cfg.find("patterns");
  if (pats == cfg.end() || pats->second.empty()) {
    std::cerr << "error: pattern spec needs a [patterns] section\n";
    std::exit(1);
  }
  // deterministic predictor order: the canonical pattern order
  const std::vector<std::string> order = {"always_on", "one_switch", "two_switch",
                                          "short_lived", "always_zero"};
  for (const auto& name : order) {
    const auto it = pats->second.find(name);
    if (it == pats->second.end()) continue;
    const int count = std::atoi(it->second.c_str());
    for (int c = 0; c < count; ++c) spec.patterns.push_back(name);
  }
  for (const auto& [key, value] : pats->second) {
    if (std::find(order.begin(), order.end(), key) == order.end()) {
      std::cerr << "error: unknown pattern '" << key << "'\n";
      std::exit(1);
    }
  }
  if (spec.patterns.empty()) {
    std::cerr << "error: pattern spec selects no predictors\n";
    std::exit(1);
  }
  return spec;
}

int cmd_simulate(const CommonArgs& common, const std::string& pattern_path,
                 int replicates, bool homoskedastic, bool smooth, bool no_prune) {
  const SimSpec spec = read_sim_spec(pattern_path);
  const int p = static_cast<int>(spec.patterns.size());
  std::string pattern_csv;
  for (size_t i = 0; i < spec.patterns.size(); ++i) {
    if (i) pattern_csv += ',';
    pattern_csv += spec.patterns[i];
  }

  dsp_options* opts = dsp_options_create();
  json manifest_opts;
  dsp_options_set(opts, "heteroskedastic", homoskedastic ? 0.0 : 1.0);
  dsp_options_set(opts, "smooth", smooth ? 1.0 : 0.0);
  dsp_options_set(opts, "prune", no_prune ? 0.0 : 1.0);
  apply_config_and_overrides(opts, common, manifest_opts);

  struct Row {
    int replicate;
    int predictor;
    std::string pattern;
    double score;  // F1, or classification accuracy for always_zero
    double mse;
  };
  std::vector<Row> rows(static_cast<size_t>(replicates) * p);
  std::mutex fail_mutex;
  std::string failure;

  std::atomic<int> next(0);
  auto worker = [&]() {
    const int n = spec.n;
    std::vector<double> beta_true(static_cast<size_t>(n) * p);
    std::vector<double> gamma_true(static_cast<size_t>(n) * p);
    std::vector<double> incl(static_cast<size_t>(n) * p);
    std::vector<double> coef(static_cast<size_t>(n) * p);
    std::vector<double> col_hat(n), col_true(n), col_beta(n), col_beta_true(n);
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= replicates || !failure.empty()) return;
      dsp_dataset* d = nullptr;
      dsp_fit* f = nullptr;
      const auto fail = [&](const std::string& what) {
        std::lock_guard<std::mutex> lock(fail_mutex);
        if (failure.empty()) failure = what + ": " + dsp_last_error();
      };
      if (dsp_dataset_simulate(pattern_csv.c_str(), n, spec.noise_var, spec.x_autocorr,
                               common.seed + static_cast<std::uint64_t>(r), &d,
                               beta_true.data(), gamma_true.data()) != DSP_OK) {
        fail("simulate replicate " + std::to_string(r));
        return;
      }
      if (dsp_fit_run(d, opts, &f) != DSP_OK) {
        dsp_dataset_free(d);
        fail("fit replicate " + std::to_string(r));
        return;
      }
      dsp_fit_inclusion(f, incl.data());
      dsp_fit_coefficients(f, coef.data());
      for (int j = 0; j < p; ++j) {
        for (int i = 0; i < n; ++i) {
          col_hat[i] = incl[static_cast<size_t>(i) * p + j];
          col_true[i] = gamma_true[static_cast<size_t>(i) * p + j];
          col_beta[i] = coef[static_cast<size_t>(i) * p + j];
          col_beta_true[i] = beta_true[static_cast<size_t>(i) * p + j];
        }
        double score = 0.0, mse = 0.0;
        if (spec.patterns[j] == "always_zero")
          dsp_metric_accuracy(col_hat.data(), col_true.data(), n, 0.5, &score);
        else
          dsp_metric_f1(col_hat.data(), col_true.data(), n, 0.5, &score);
        dsp_metric_mse(col_beta.data(), col_beta_true.data(), n, &mse);
        rows[static_cast<size_t>(r) * p + j] = {r, j, spec.patterns[j], score, mse};
      }
      dsp_fit_free(f);
      dsp_dataset_free(d);
    }
  };
  {
    const int workers = std::max(1, std::min(common.threads, replicates));
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (!failure.empty()) {
    std::cerr << "error: " << failure << "\n";
    return 1;
  }

  const fs::path dir = prepare_out_dir(common.out_dir);
  {
    std::ofstream out(dir / "metrics.csv");
    out << "replicate,predictor,pattern,score,mse\n";
    for (const auto& row : rows)
      out << row.replicate << ',' << row.predictor + 1 << ',' << row.pattern << ','
          << fmt17(row.score) << ',' << fmt17(row.mse) << '\n';
  }
  json summary;
  for (const auto& name : {"always_on", "one_switch", "two_switch", "short_lived",
                           "always_zero"}) {
    std::vector<double> scores, mses;
    for (const auto& row : rows)
      if (row.pattern == name) {
        scores.push_back(row.score);
        mses.push_back(row.mse);
      }
    if (scores.empty()) continue;
    json entry;
    entry["metric"] = std::string(name) == "always_zero" ? "accuracy" : "f1";
    entry["median_score"] = median(scores);
    entry["median_mse"] = median(mses);
    entry["count"] = scores.size();
    summary[name] = entry;
  }
  {
    std::ofstream out(dir / "summary.json");
    out << summary.dump(2) << '\n';
  }
  json cfg;
  cfg["pattern_file"] = pattern_path;
  cfg["n"] = spec.n;
  cfg["noise_var"] = spec.noise_var;
  cfg["x_autocorr"] = spec.x_autocorr;
  cfg["patterns"] = spec.patterns;
  cfg["replicates"] = replicates;
  cfg["seed"] = common.seed;
  cfg["options"] = manifest_opts;
  write_manifest(dir, "simulate", cfg);
  std::cout << "simulate: " << replicates << " replicates, outputs in " << dir.string()
            << "\n"
            << summary.dump(2) << "\n";
  dsp_options_free(opts);
  return 0;
}

// ---------------- compare-mcmc ----------------

int cmd_compare_mcmc(const CommonArgs& common, const DatasetArgs& data_args, int draws,
                     int burnin, const std::string& dump_draws) {
  dsp_options* opts = dsp_options_create();
  json manifest_opts;
  // like-for-like with the homoskedastic sampler, no pruning
  dsp_options_set(opts, "heteroskedastic", 0.0);
  dsp_options_set(opts, "prune", 0.0);
  apply_config_and_overrides(opts, common, manifest_opts);

  dsp_dataset* d = load_dataset(data_args);
  const int n = dsp_dataset_rows(d);
  const int p = dsp_dataset_cols(d);

  dsp_fit* f = nullptr;
  check(dsp_fit_run(d, opts, &f), "fit");
  dsp_gibbs* g = nullptr;
  check(dsp_gibbs_run(d, opts, draws, burnin, common.seed, &g), "gibbs");

  const fs::path dir = prepare_out_dir(common.out_dir);
  const char* families[] = {"beta", "b", "gamma"};
  json summary;
  for (const char* fam : families) {
    std::ofstream out(dir / (std::string("overlap_") + fam + ".csv"));
    out << "t";
    for (int j = 0; j < p; ++j) out << ',' << dsp_dataset_name(d, j);
    out << '\n';
    std::vector<std::vector<double>> per_j(p);
    for (int t = 1; t <= n; ++t) {
      out << t;
      for (int j = 0; j < p; ++j) {
        double pct = 0.0;
        check(dsp_overlap(f, g, fam, j, t, &pct), "overlap");
        out << ',' << fmt17(pct);
        per_j[j].push_back(pct);
      }
      out << '\n';
    }
    json fam_summary;
    for (int j = 0; j < p; ++j) {
      std::vector<double> xs = per_j[j];
      std::sort(xs.begin(), xs.end());
      json e;
      e["min"] = xs.front();
      e["q1"] = xs[xs.size() / 4];
      e["median"] = median(xs);
      e["q3"] = xs[3 * xs.size() / 4];
      e["max"] = xs.back();
      fam_summary[dsp_dataset_name(d, j)] = e;
    }
    summary[fam] = fam_summary;
  }
  {
    std::ofstream out(dir / "summary.json");
    out << summary.dump(2) << '\n';
  }
  if (!dump_draws.empty()) {
    for (int j = 0; j < p; ++j) {
      const std::string tag = "_x" + std::to_string(j + 1) + ".csv";
      check(dsp_gibbs_export_csv(g, "b", j, (dir / ("draws_b" + tag)).string().c_str()),
            "export b draws");
      check(dsp_gibbs_export_csv(g, "gamma", j,
                                 (dir / ("draws_gamma" + tag)).string().c_str()),
            "export gamma draws");
    }
    check(dsp_gibbs_export_csv(g, "sigma2", 0,
                               (dir / "draws_sigma2.csv").string().c_str()),
          "export sigma2 draws");
  }

  json cfg = dataset_manifest(data_args);
  cfg["draws"] = draws;
  cfg["burnin"] = burnin;
  cfg["seed"] = common.seed;
  cfg["options"] = manifest_opts;
  write_manifest(dir, "compare-mcmc", cfg);
  std::cout << "compare-mcmc: outputs in " << dir.string() << "\n";

  dsp_gibbs_free(g);
  dsp_fit_free(f);
  dsp_dataset_free(d);
  dsp_options_free(opts);
  return 0;
}

// ---------------- forecast ----------------

int cmd_forecast(const CommonArgs& common, const DatasetArgs& data_args,
                 const std::string& scheme, int horizon, bool homoskedastic, bool smooth,
                 bool no_prune) {
  dsp_options* opts = dsp_options_create();
  json manifest_opts;
  dsp_options_set(opts, "heteroskedastic", homoskedastic ? 0.0 : 1.0);
  dsp_options_set(opts, "smooth", smooth ? 1.0 : 0.0);
  dsp_options_set(opts, "prune", no_prune ? 0.0 : 1.0);
  apply_config_and_overrides(opts, common, manifest_opts);

  dsp_dataset* d = load_dataset(data_args);
  dsp_forecasts* model = nullptr;
  dsp_forecasts* bench = nullptr;
  check(dsp_forecast_run(d, opts, scheme.c_str(), horizon, common.threads, &model),
        "forecast");
  check(dsp_forecast_benchmark(d, scheme.c_str(), horizon, &bench), "benchmark");

  const fs::path dir = prepare_out_dir(common.out_dir);
  write_forecast_csv(dir / "forecast.csv", model);
  write_forecast_csv(dir / "benchmark.csv", bench);

  double rmsfe, rmae, als, s1, p1, s2, p2;
  check(dsp_forecasts_compare(model, bench, horizon, &rmsfe, &rmae, &als, &s1, &p1, &s2,
                              &p2),
        "compare");
  json cmp;
  cmp["benchmark"] = "recursive_mean";
  cmp["records"] = dsp_forecasts_count(model);
  cmp["rmsfe"] = rmsfe;
  cmp["rmae"] = rmae;
  cmp["als"] = als;
  cmp["dm_squared"] = {{"statistic", s1}, {"p_value", p1}};
  cmp["dm_absolute"] = {{"statistic", s2}, {"p_value", p2}};
  {
    std::ofstream out(dir / "comparison.json");
    out << cmp.dump(2) << '\n';
  }
  json cfg = dataset_manifest(data_args);
  cfg["scheme"] = scheme;
  cfg["forecast_horizon"] = horizon;
  cfg["seed"] = common.seed;
  cfg["options"] = manifest_opts;
  write_manifest(dir, "forecast", cfg);
  std::cout << "forecast: " << dsp_forecasts_count(model) << " records, outputs in "
            << dir.string() << "\n"
            << cmp.dump(2) << "\n";

  dsp_forecasts_free(model);
  dsp_forecasts_free(bench);
  dsp_dataset_free(d);
  dsp_options_free(opts);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic Bernoulli-Gaussian variable selection for time-varying-parameter "
               "regressions"};
  app.require_subcommand(1);

  CommonArgs common;
  DatasetArgs data_args;
  bool smooth = false, homoskedastic = false, no_prune = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", common.out_dir, "output directory")->required();
    cmd->add_option("--seed", common.seed, "master seed (default 42)");
    cmd->add_option("--threads", common.threads,
                    "parallel workers (default: DYNSPARSE_THREADS or all cores)");
    cmd->add_option("--config", common.config_path,
                    "key = value option file; command-line flags win");
    cmd->add_option("--set", common.hyper_overrides,
                    "override a model option, e.g. --set b_xi=1");
  };
  auto add_data = [&](CLI::App* cmd) {
    cmd->add_option("--input", data_args.input, "input CSV")->required();
    cmd->add_option("--target", data_args.target, "target column name")->required();
    cmd->add_option("--date-col", data_args.date_col, "date column to carry through");
    cmd->add_option("--horizon", data_args.horizon, "forecast horizon (default 1)");
    cmd->add_flag("--transform", data_args.transform,
                  "treat the target as a price level: y = (400/h) ln(P_t/P_{t-1})");
    cmd->add_flag("--standardize", data_args.standardize, "standardize predictors");
  };
  auto add_model_flags = [&](CLI::App* cmd) {
    cmd->add_flag("--smooth", smooth, "smooth the inclusion probabilities");
    cmd->add_flag("--homoskedastic", homoskedastic,
                  "constant observation variance instead of stochastic volatility");
    cmd->add_flag("--no-prune", no_prune, "disable on-line predictor pruning");
  };

  CLI::App* fit_cmd = app.add_subcommand("fit", "fit the model to a CSV");
  add_common(fit_cmd);
  add_data(fit_cmd);
  add_model_flags(fit_cmd);

  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "run the simulation laboratory on a pattern spec");
  std::string pattern_path;
  int replicates = 100;
  add_common(sim_cmd);
  sim_cmd->add_option("--pattern", pattern_path, "pattern spec file")->required();
  sim_cmd->add_option("--replicates", replicates, "number of replicates (default 100)");
  add_model_flags(sim_cmd);

  CLI::App* cmp_cmd = app.add_subcommand(
      "compare-mcmc", "fit and Gibbs-sample the same data, report overlap accuracy");
  int draws = 20000, burnin = 5000;
  std::string dump_draws;
  add_common(cmp_cmd);
  add_data(cmp_cmd);
  cmp_cmd->add_option("--draws", draws, "total MCMC draws (default 20000)");
  cmp_cmd->add_option("--burnin", burnin, "burn-in draws (default 5000)");
  cmp_cmd->add_flag("--dump-draws", [&dump_draws](size_t) { dump_draws = "yes"; },
                    "also export raw draws to CSV");

  CLI::App* fc_cmd =
      app.add_subcommand("forecast", "rolling/expanding out-of-sample evaluation");
  std::string scheme = "expanding:240";
  int fc_horizon = 1;
  add_common(fc_cmd);
  add_data(fc_cmd);
  fc_cmd->add_option("--scheme", scheme, "expanding:<burnin> or rolling:<window>");
  fc_cmd->add_option("--forecast-horizon", fc_horizon,
                     "steps ahead for the state propagation (default 1)");
  add_model_flags(fc_cmd);

  CLI11_PARSE(app, argc, argv);

  if (fit_cmd->parsed())
    return cmd_fit(common, data_args, smooth, homoskedastic, no_prune);
  if (sim_cmd->parsed())
    return cmd_simulate(common, pattern_path, replicates, homoskedastic, smooth, no_prune);
  if (cmp_cmd->parsed())
    return cmd_compare_mcmc(common, data_args, draws, burnin, dump_draws);
  if (fc_cmd->parsed())
    return cmd_forecast(common, data_args, scheme, fc_horizon, homoskedastic, smooth,
                        no_prune);
  return 1;
}
