#include "gmrf.hpp"

#include <cmath>

namespace dynsparse {

TridiagPrecision build_precision(int n, double k0) {
  if (n < 1) throw std::invalid_argument("build_precision: n must be >= 1");
  if (!(k0 > 0.0)) throw std::invalid_argument("build_precision: k0 must be > 0");
  TridiagPrecision q;
  q.n = n;
  q.k0 = k0;
  q.diag = VectorXd::Constant(n + 1, 2.0);
  q.diag(0) = 1.0 + 1.0 / k0;
  q.diag(n) = 1.0;
  q.offdiag = VectorXd::Constant(n, -1.0);
  return q;
}

SymTridiag SymTridiag::from_precision(const TridiagPrecision& q, double scale) {
  SymTridiag a;
  a.diag = scale * q.diag;
  a.off = scale * q.offdiag;
  return a;
}

SymTridiag SymTridiag::shifted(const TridiagPrecision& q, double scale, const VectorXd& d) {
  SymTridiag a = from_precision(q, scale);
  if (d.size() > a.diag.size())
    throw std::invalid_argument("SymTridiag::shifted: diagonal shift too long");
  a.diag.head(d.size()) += d;
  return a;
}

TridiagCholesky::TridiagCholesky(const SymTridiag& a) {
  const int m = a.dim();
  if (m == 0) throw std::invalid_argument("TridiagCholesky: empty matrix");
  if (a.off.size() != m - 1)
    throw std::invalid_argument("TridiagCholesky: band size mismatch");
  d_.resize(m);
  e_.resize(m > 1 ? m - 1 : 0);
  double piv = a.diag(0);
  if (!(piv > 0.0)) throw numeric_error("tridiagonal factorization failed: pivot <= 0", 0);
  d_(0) = std::sqrt(piv);
  for (int i = 1; i < m; ++i) {
    e_(i - 1) = a.off(i - 1) / d_(i - 1);
    piv = a.diag(i) - e_(i - 1) * e_(i - 1);
    if (!(piv > 0.0)) throw numeric_error("tridiagonal factorization failed: pivot <= 0", i);
    d_(i) = std::sqrt(piv);
  }
}

VectorXd TridiagCholesky::solve(const VectorXd& rhs) const {
  const int m = dim();
  if (rhs.size() != m) throw std::invalid_argument("solve: rhs dimension mismatch");
  VectorXd x(m);
  // L y = rhs
  x(0) = rhs(0) / d_(0);
  for (int i = 1; i < m; ++i) x(i) = (rhs(i) - e_(i - 1) * x(i - 1)) / d_(i);
  // L' x = y
  x(m - 1) /= d_(m - 1);
  for (int i = m - 2; i >= 0; --i) x(i) = (x(i) - e_(i) * x(i + 1)) / d_(i);
  return x;
}

MatrixXd TridiagCholesky::solve(const MatrixXd& rhs) const {
  MatrixXd out(rhs.rows(), rhs.cols());
  for (int c = 0; c < rhs.cols(); ++c) out.col(c) = solve(VectorXd(rhs.col(c)));
  return out;
}

void TridiagCholesky::inverse_band(VectorXd& inv_diag, VectorXd& inv_off) const {
  const int m = dim();
  inv_diag.resize(m);
  inv_off.resize(m > 1 ? m - 1 : 0);
  inv_diag(m - 1) = 1.0 / (d_(m - 1) * d_(m - 1));
  for (int i = m - 2; i >= 0; --i) {
    const double r = e_(i) / d_(i);
    inv_off(i) = -r * inv_diag(i + 1);
    inv_diag(i) = 1.0 / (d_(i) * d_(i)) - r * inv_off(i);
  }
}

MatrixXd TridiagCholesky::inverse_dense(int max_dim) const {
  const int m = dim();
  if (m > max_dim)
    throw numeric_error("inverse_dense: dimension exceeds the dense-inverse cap", m);
  MatrixXd inv = solve(MatrixXd(MatrixXd::Identity(m, m)));
  // symmetrize away the last round-off bits
  return 0.5 * (inv + inv.transpose());
}

VectorXd TridiagCholesky::sample(std::mt19937_64& rng) const {
  const int m = dim();
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd z(m);
  for (int i = 0; i < m; ++i) z(i) = gauss(rng);
  // x = L'^{-1} z  =>  Cov(x) = (L L')^{-1}
  VectorXd x(m);
  x(m - 1) = z(m - 1) / d_(m - 1);
  for (int i = m - 2; i >= 0; --i) x(i) = (z(i) - e_(i) * x(i + 1)) / d_(i);
  return x;
}

double TridiagCholesky::log_det() const {
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) s += std::log(d_(i));
  return 2.0 * s;
}

double quad_form_expectation(const VectorXd& mu, const VectorXd& sigma_diag,
                             const VectorXd& sigma_off, const TridiagPrecision& q) {
  const int m = q.dim();
  if (mu.size() != m || sigma_diag.size() != m || sigma_off.size() != m - 1)
    throw std::invalid_argument("quad_form_expectation: dimension mismatch");
  double quad = 0.0, trace = 0.0;
  for (int i = 0; i < m; ++i) {
    quad += q.diag(i) * mu(i) * mu(i);
    trace += q.diag(i) * sigma_diag(i);
  }
  for (int i = 0; i + 1 < m; ++i) {
    quad += 2.0 * q.offdiag(i) * mu(i) * mu(i + 1);
    trace += 2.0 * q.offdiag(i) * sigma_off(i);
  }
  return quad + trace;
}

MatrixXd dense_from(const TridiagPrecision& q) {
  const int m = q.dim();
  MatrixXd a = MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) a(i, i) = q.diag(i);
  for (int i = 0; i + 1 < m; ++i) {
    a(i, i + 1) = q.offdiag(i);
    a(i + 1, i) = q.offdiag(i);
  }
  return a;
}

MatrixXd dense_from(const SymTridiag& a) {
  const int m = a.dim();
  MatrixXd out = MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) out(i, i) = a.diag(i);
  for (int i = 0; i + 1 < m; ++i) {
    out(i, i + 1) = a.off(i);
    out(i + 1, i) = a.off(i);
  }
  return out;
}

}  // namespace dynsparse
