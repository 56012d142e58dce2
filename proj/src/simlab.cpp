#include "simlab.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace dynsparse {

const char* pattern_name(PatternKind kind) {
  switch (kind) {
    case PatternKind::AlwaysOn: return "always_on";
    case PatternKind::OneSwitch: return "one_switch";
    case PatternKind::TwoSwitch: return "two_switch";
    case PatternKind::ShortLived: return "short_lived";
    case PatternKind::AlwaysZero: return "always_zero";
  }
  return "unknown";
}

std::optional<PatternKind> pattern_from_name(const std::string& name) {
  if (name == "always_on") return PatternKind::AlwaysOn;
  if (name == "one_switch") return PatternKind::OneSwitch;
  if (name == "two_switch") return PatternKind::TwoSwitch;
  if (name == "short_lived") return PatternKind::ShortLived;
  if (name == "always_zero") return PatternKind::AlwaysZero;
  return std::nullopt;
}

namespace {

VectorXd ar1_path(int len, double rho, double var, std::mt19937_64& rng) {
  VectorXd path(len);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sd0 = std::sqrt(var / (1.0 - rho * rho));
  path(0) = sd0 * gauss(rng);
  const double sd = std::sqrt(var);
  for (int t = 1; t < len; ++t) path(t) = rho * path(t - 1) + sd * gauss(rng);
  return path;
}

}  // namespace

CoefPattern gen_always_on(int n, std::mt19937_64& rng, double rho, double var) {
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("gen_always_on: |rho| < 1 required");
  CoefPattern p;
  p.kind = PatternKind::AlwaysOn;
  p.beta = ar1_path(n, rho, var, rng);
  p.gamma_true = VectorXd::Ones(n);
  return p;
}

CoefPattern gen_always_zero(int n) {
  CoefPattern p;
  p.kind = PatternKind::AlwaysZero;
  p.beta = VectorXd::Zero(n);
  p.gamma_true = VectorXd::Zero(n);
  return p;
}

CoefPattern gen_switching(int n, int expected_segments, std::mt19937_64& rng, double rho,
                          double var) {
  if (expected_segments < 1)
    throw std::invalid_argument("gen_switching: expected_segments must be >= 1");
  CoefPattern p;
  p.kind = expected_segments <= 2 ? PatternKind::OneSwitch : PatternKind::TwoSwitch;
  p.beta = VectorXd::Zero(n);
  p.gamma_true = VectorXd::Zero(n);
  std::poisson_distribution<int> pois(static_cast<double>(n) / expected_segments);
  std::bernoulli_distribution coin(0.5);
  bool on = coin(rng);
  int pos = 0;
  while (pos < n) {
    const int len = std::min(std::max(pois(rng), 1), n - pos);
    if (on) {
      p.gamma_true.segment(pos, len).setOnes();
      p.beta.segment(pos, len) = ar1_path(len, rho, var, rng);
    }
    pos += len;
    on = !on;
  }
  return p;
}

CoefPattern gen_short_lived(int n, std::mt19937_64& rng, double rho, double var) {
  CoefPattern p;
  p.kind = PatternKind::ShortLived;
  p.beta = VectorXd::Zero(n);
  p.gamma_true = VectorXd::Zero(n);
  std::poisson_distribution<int> pois(static_cast<double>(n) / 10.0);
  const int len = std::min(pois(rng), n);
  if (len == 0) return p;  // degenerates to an always-zero pattern
  std::uniform_int_distribution<int> start(0, n - len);
  const int pos = start(rng);
  p.gamma_true.segment(pos, len).setOnes();
  p.beta.segment(pos, len) = ar1_path(len, rho, var, rng);
  return p;
}

CoefPattern gen_pattern(PatternKind kind, int n, std::mt19937_64& rng) {
  switch (kind) {
    case PatternKind::AlwaysOn: return gen_always_on(n, rng);
    case PatternKind::OneSwitch: return gen_switching(n, 2, rng);
    case PatternKind::TwoSwitch: return gen_switching(n, 4, rng);
    case PatternKind::ShortLived: return gen_short_lived(n, rng);
    case PatternKind::AlwaysZero: return gen_always_zero(n);
  }
  throw std::invalid_argument("gen_pattern: unknown kind");
}

std::pair<Dataset, SimTruth> gen_dataset(const std::vector<CoefPattern>& patterns,
                                         std::mt19937_64& rng, const GenOptions& opts) {
  const int p = static_cast<int>(patterns.size());
  if (p < 1) throw std::invalid_argument("gen_dataset: need at least one pattern");
  const int n = static_cast<int>(patterns[0].beta.size());
  for (const auto& pat : patterns)
    if (pat.beta.size() != n || pat.gamma_true.size() != n)
      throw std::invalid_argument("gen_dataset: pattern lengths differ");

  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXd x(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x(i, j) = gauss(rng);
  if (opts.cross_corr) {
    const MatrixXd& corr = *opts.cross_corr;
    if (corr.rows() != p || corr.cols() != p)
      throw std::invalid_argument("gen_dataset: cross_corr must be p x p");
    Eigen::LLT<MatrixXd> llt(corr);
    if (llt.info() != Eigen::Success)
      throw numeric_error("gen_dataset: cross_corr is not positive definite");
    x = x * MatrixXd(llt.matrixL()).transpose();
  }
  if (opts.x_autocorr != 0.0) {
    const double a = opts.x_autocorr;
    const double scale = std::sqrt(1.0 - a * a);  // keep unit marginal variance
    for (int i = 1; i < n; ++i) x.row(i) = a * x.row(i - 1) + scale * x.row(i);
  }

  Dataset data;
  SimTruth truth;
  truth.beta.resize(n, p);
  truth.gamma_true.resize(n, p);
  for (int j = 0; j < p; ++j) {
    truth.beta.col(j) = patterns[j].beta;
    truth.gamma_true.col(j) = patterns[j].gamma_true;
  }
  data.X = x;
  data.y.resize(n);
  const double noise_sd = std::sqrt(opts.noise_var);
  for (int i = 0; i < n; ++i) {
    double mean = 0.0;
    for (int j = 0; j < p; ++j) mean += truth.beta(i, j) * x(i, j);
    data.y(i) = mean + noise_sd * gauss(rng);
  }
  data.names.resize(p);
  for (int j = 0; j < p; ++j)
    data.names[j] = std::string(pattern_name(patterns[j].kind)) + "_" + std::to_string(j + 1);
  return {std::move(data), std::move(truth)};
}

double f1_score(const VectorXd& gamma_hat, const VectorXd& gamma_true, double threshold) {
  if (gamma_hat.size() != gamma_true.size())
    throw std::invalid_argument("f1_score: length mismatch");
  int tp = 0, fp = 0, fn = 0;
  for (int i = 0; i < gamma_hat.size(); ++i) {
    const bool pred = gamma_hat(i) >= threshold;
    const bool truth = gamma_true(i) > 0.5;
    if (pred && truth) ++tp;
    if (pred && !truth) ++fp;
    if (!pred && truth) ++fn;
  }
  const double denom = 2.0 * tp + fp + fn;
  if (denom == 0.0) return 1.0;
  return 2.0 * tp / denom;
}

double classification_accuracy(const VectorXd& gamma_hat, const VectorXd& gamma_true,
                               double threshold) {
  if (gamma_hat.size() != gamma_true.size())
    throw std::invalid_argument("classification_accuracy: length mismatch");
  int ok = 0;
  for (int i = 0; i < gamma_hat.size(); ++i)
    if ((gamma_hat(i) >= threshold) == (gamma_true(i) > 0.5)) ++ok;
  return static_cast<double>(ok) / gamma_hat.size();
}

double mse_path(const VectorXd& beta_hat, const VectorXd& beta_true) {
  if (beta_hat.size() != beta_true.size())
    throw std::invalid_argument("mse_path: length mismatch");
  return (beta_hat - beta_true).squaredNorm() / beta_hat.size();
}

double overlap_from_grids(const VectorXd& grid, const VectorXd& f, const VectorXd& g,
                          double atom_f, double atom_g) {
  if (grid.size() != f.size() || grid.size() != g.size())
    throw std::invalid_argument("overlap_from_grids: size mismatch");
  double l1 = std::abs(atom_f - atom_g);
  for (int i = 0; i + 1 < grid.size(); ++i) {
    const double w = grid(i + 1) - grid(i);
    l1 += 0.5 * w * (std::abs(f(i) - g(i)) + std::abs(f(i + 1) - g(i + 1)));
  }
  return 100.0 * std::max(0.0, 1.0 - 0.5 * l1);
}

VectorXd overlap_grid(double mu, double sd, const VectorXd& samples, int points) {
  double lo = mu - 6.0 * sd;
  double hi = mu + 6.0 * sd;
  if (samples.size() > 0) {
    lo = std::min(lo, samples.minCoeff());
    hi = std::max(hi, samples.maxCoeff());
  }
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  VectorXd grid(points);
  for (int i = 0; i < points; ++i) grid(i) = lo + (hi - lo) * i / (points - 1);
  return grid;
}

VectorXd histogram_density(const VectorXd& samples, const VectorXd& grid, double weight) {
  VectorXd dens = VectorXd::Zero(grid.size());
  const int m = static_cast<int>(samples.size());
  if (m == 0 || weight <= 0.0) return dens;
  std::vector<double> sorted(samples.data(), samples.data() + m);
  std::sort(sorted.begin(), sorted.end());
  const double q1 = sorted[static_cast<int>(0.25 * (m - 1))];
  const double q3 = sorted[static_cast<int>(0.75 * (m - 1))];
  const double lo = sorted.front();
  const double hi = sorted.back();
  double width = 2.0 * (q3 - q1) * std::pow(static_cast<double>(m), -1.0 / 3.0);
  if (width <= 0.0) width = (hi - lo) > 0.0 ? (hi - lo) / 10.0 : 1e-3;
  const int bins = std::max(1, static_cast<int>(std::ceil((hi - lo) / width)));
  width = bins > 0 && hi > lo ? (hi - lo) / bins : width;
  std::vector<double> counts(bins, 0.0);
  for (double s : sorted) {
    int bin = hi > lo ? static_cast<int>((s - lo) / width) : 0;
    bin = std::min(std::max(bin, 0), bins - 1);
    counts[bin] += 1.0;
  }
  for (int i = 0; i < grid.size(); ++i) {
    const double x = grid(i);
    if (x < lo || x > hi) continue;
    int bin = std::min(std::max(static_cast<int>((x - lo) / width), 0), bins - 1);
    dens(i) = weight * counts[bin] / (m * width);
  }
  return dens;
}

namespace {
VectorXd gaussian_on_grid(const VectorXd& grid, double mu, double var, double weight) {
  VectorXd f(grid.size());
  const double sd = std::sqrt(std::max(var, 1e-300));
  for (int i = 0; i < grid.size(); ++i) {
    const double zsc = (grid(i) - mu) / sd;
    f(i) = weight * std::exp(-0.5 * zsc * zsc) / (sd * std::sqrt(2.0 * 3.14159265358979323846));
  }
  return f;
}
}  // namespace

double overlap_gaussian(double mu, double var, const VectorXd& samples) {
  const double sd = std::sqrt(std::max(var, 0.0));
  const VectorXd grid = overlap_grid(mu, sd > 0 ? sd : 1.0, samples);
  const VectorXd f = gaussian_on_grid(grid, mu, var, 1.0);
  const VectorXd g = histogram_density(samples, grid, 1.0);
  return overlap_from_grids(grid, f, g);
}

double overlap_beta_mixture(double w, double mu, double var, const VectorXd& samples) {
  const int m = static_cast<int>(samples.size());
  int zeros = 0;
  std::vector<double> nz;
  nz.reserve(m);
  for (int i = 0; i < m; ++i) {
    if (samples(i) == 0.0)
      ++zeros;
    else
      nz.push_back(samples(i));
  }
  const double atom_q = 1.0 - w;
  const double atom_p = m > 0 ? static_cast<double>(zeros) / m : 0.0;
  VectorXd nonzero = Eigen::Map<VectorXd>(nz.data(), static_cast<long>(nz.size()));
  const double sd = std::sqrt(std::max(var, 0.0));
  const VectorXd grid = overlap_grid(mu, sd > 0 ? sd : 1.0, nonzero);
  const VectorXd f = gaussian_on_grid(grid, mu, var, w);
  const VectorXd g = histogram_density(nonzero, grid, 1.0 - atom_p);
  return overlap_from_grids(grid, f, g, atom_q, atom_p);
}

double overlap_bernoulli(double prob, const VectorXd& samples01) {
  const double phat = samples01.size() > 0 ? samples01.mean() : 0.0;
  return 100.0 * (1.0 - std::abs(prob - phat));
}

}  // namespace dynsparse
