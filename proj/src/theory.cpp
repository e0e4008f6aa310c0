#include "vmrp/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vmrp {

namespace {

void require_mu(double mu, const char* what) {
  if (!(mu > 0.0 && mu <= 1.0)) throw std::invalid_argument(std::string(what) + ": mu must lie in (0, 1]");
}

void require_dims(const PDMatrix& a, const PDMatrix& b, const char* what) {
  if (a.dim() != b.dim()) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

// kappa_T with lambda_min of the second argument supplied directly.
double kappa_T_with(const PDMatrix& D, double lambda_min_C) {
  const double n = static_cast<double>(D.dim());
  return (D.matrix().trace() / eig_extremes(D).min + 2.0) / (lambda_min_C * (n + 2.0));
}

// lambda^N, 0 on underflow.
double power(double lambda, std::int64_t N, bool& underflow) {
  const double p = std::pow(lambda, static_cast<double>(N));
  if (p == 0.0 && lambda != 0.0 && N > 0) underflow = true;
  return std::isfinite(p) ? p : 0.0;
}

}  // namespace

double rho_hat(const PDMatrix& L, const PDMatrix& Sigma, const PDMatrix& M, double mu) {
  require_mu(mu, "rho_hat");
  require_dims(L, Sigma, "rho_hat");
  require_dims(L, M, "rho_hat");
  const double n = static_cast<double>(L.dim());
  return 1.0 - mu / (n * kappa_T(similar_product(L, Sigma), M));
}

double rho_exact(const PDMatrix& L, const PDMatrix& Sigma, const Vector& grad, double mu,
                 const std::optional<PDMatrix>& C) {
  require_mu(mu, "rho_exact");
  require_dims(L, Sigma, "rho_exact");
  if (grad.size() != L.dim()) throw std::invalid_argument("rho_exact: dimension mismatch");
  if (grad.squaredNorm() == 0.0) throw std::invalid_argument("rho_exact: zero gradient");
  const double n = static_cast<double>(L.dim());
  const PDMatrix c = C ? *C : PDMatrix::identity(L.dim());
  return 1.0 - mu / (n * kappa_E(L, Sigma, c, grad));
}

double bound_convex(double R, const PDMatrix& L, const PDMatrix& Sigma, double mu, double f0_gap,
                    std::int64_t N) {
  require_mu(mu, "bound_convex");
  require_dims(L, Sigma, "bound_convex");
  if (!(R > 0.0)) throw std::invalid_argument("bound_convex: R must be positive");
  if (f0_gap < 0.0) throw std::invalid_argument("bound_convex: f0_gap must be non-negative");
  if (N < 0) throw std::invalid_argument("bound_convex: N must be non-negative");
  const double n = static_cast<double>(L.dim());
  const double q = std::max(2.0 * n * R * R * kappa_T(similar_product(L, Sigma)) / mu, f0_gap);
  return q / (static_cast<double>(N) + 1.0);
}

double rho_relaxed(const PDMatrix& L, const PDMatrix& Sigma, const PDMatrix& M, double mu) {
  require_mu(mu, "rho_relaxed");
  require_dims(L, Sigma, "rho_relaxed");
  require_dims(L, M, "rho_relaxed");
  const double n = static_cast<double>(L.dim());
  // M L^{-1} has the spectrum of L^{-1/2} M L^{-1/2}.
  const double lambda_min = generalized_eig_extremes(M, L).min;
  return 1.0 - mu / (4.0 * n * kappa_T_with(similar_product(L, Sigma), lambda_min));
}

Eigen::Matrix2d RheSpectralConstants::recurrence() const {
  Eigen::Matrix2d c;
  c << 1.0 - 2.0 * eta, -eta, 2.0 * eta, 1.0 - (2.0 * n + 3.0) * eta;
  return c;
}

Eigen::Matrix2d RheSpectralConstants::left() const {
  const double m = 2.0 * n + 1.0;
  Eigen::Matrix2d p;
  p << (m - omega) / (4.0 * omega), (m + omega) / (4.0 * omega), 1.0 / omega, 1.0 / omega;
  return p;
}

Eigen::Matrix2d RheSpectralConstants::diag() const {
  Eigen::Matrix2d d;
  d << lambda1, 0.0, 0.0, lambda2;
  return d;
}

Eigen::Matrix2d RheSpectralConstants::right() const {
  const double m = 2.0 * n + 1.0;
  Eigen::Matrix2d q;
  q << -2.0, (omega + m) / 2.0, 2.0, (omega - m) / 2.0;
  return q;
}

RheSpectralConstants rhe_constants(int n) {
  if (n < 2) throw std::invalid_argument("rhe_constants: n must be at least 2");
  const double d = static_cast<double>(n);
  RheSpectralConstants c;
  c.n = n;
  c.omega = std::sqrt(4.0 * d * d + 4.0 * d - 7.0);
  c.eta = 1.0 / (d * (d + 2.0));
  const double base = 2.0 * d * d + 2.0 * d - 5.0;
  const double den = 2.0 * d * (d + 2.0);
  c.lambda1 = (base - c.omega) / den;
  c.lambda2 = (base + c.omega) / den;
  return c;
}

RheState rhe_exact_expectation(const RheState& s0, int n, std::int64_t N, bool* underflow) {
  if (N < 0) throw std::invalid_argument("rhe_exact_expectation: N must be non-negative");
  if (s0.frob_sq < 0.0 || s0.trace_sq < 0.0) {
    throw std::invalid_argument("rhe_exact_expectation: state must be non-negative");
  }
  const RheSpectralConstants c = rhe_constants(n);
  bool uf = false;
  const double p1 = power(c.lambda1, N, uf);
  const double p2 = power(c.lambda2, N, uf);
  if (underflow) *underflow = uf;
  const double xi1 = p1 + p2;
  const double xi2 = p1 - p2;
  const double m = 2.0 * n + 1.0;
  const double w = c.omega;
  RheState s;
  s.frob_sq = xi1 * s0.frob_sq / 2.0 - xi2 * (m * s0.frob_sq / (2.0 * w) - s0.trace_sq / w);
  s.trace_sq = xi1 * s0.trace_sq / 2.0 - xi2 * (2.0 * s0.frob_sq / w - m * s0.trace_sq / (2.0 * w));
  return s;
}

RheState rhe_recurrence(const RheState& s0, int n, std::int64_t N) {
  if (N < 0) throw std::invalid_argument("rhe_recurrence: N must be non-negative");
  const Eigen::Matrix2d c = rhe_constants(n).recurrence();
  Eigen::Vector2d v(s0.frob_sq, s0.trace_sq);
  for (std::int64_t k = 0; k < N; ++k) v = c * v;
  return {v(0), v(1)};
}

MarkovBound rhe_markov_bound(int n, std::int64_t N, double b, double frob0) {
  if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("rhe_markov_bound: b must lie in (0, 1)");
  if (n < 2) throw std::invalid_argument("rhe_markov_bound: n must be at least 2");
  if (N < 0) throw std::invalid_argument("rhe_markov_bound: N must be non-negative");
  const double d = static_cast<double>(n);
  const double rate = 1.0 - 2.0 / (d * (d + 2.0));
  MarkovBound r;
  r.j = std::log(b) / std::log(rate);
  r.bound = std::pow(rate, static_cast<double>(N) - r.j) * frob0;
  r.probability = 1.0 - b;
  return r;
}

double kappa_propagation(double a, double b, double c, double d) {
  if (!(a > 0.0 && a <= b)) throw std::invalid_argument("kappa_propagation: need 0 < a <= b");
  if (!(c >= 0.0)) throw std::invalid_argument("kappa_propagation: c must be non-negative");
  if (!(c < 1.0)) throw std::invalid_argument("kappa_propagation: c must be below 1");
  if (!(d >= 1.0)) throw std::invalid_argument("kappa_propagation: d must be at least 1");
  return (d + c) / (1.0 - c);
}

}  // namespace vmrp
