#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Core>

#include "vmrp/metric.hpp"

namespace vmrp {

/// 1 - mu / (n kappa_T(L Sigma, M)).
double rho_hat(const PDMatrix& L, const PDMatrix& Sigma, const PDMatrix& M, double mu);

/// 1 - mu / (n kappa_E(L, Sigma, C, grad)); C defaults to the identity.
double rho_exact(const PDMatrix& L, const PDMatrix& Sigma, const Vector& grad, double mu,
                 const std::optional<PDMatrix>& C = std::nullopt);

/// Q / (N + 1) with Q = max(2 n R^2 kappa_T(L Sigma) / mu, f0_gap).
double bound_convex(double R, const PDMatrix& L, const PDMatrix& Sigma, double mu, double f0_gap,
                    std::int64_t N);

/// 1 - mu / (4 n kappa_T(L Sigma, M L^{-1})).
double rho_relaxed(const PDMatrix& L, const PDMatrix& Sigma, const PDMatrix& M, double mu);

struct RheSpectralConstants {
  int n = 0;
  double omega = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double eta = 0.0;

  /// [[1 - 2 eta, -eta], [2 eta, 1 - (2n + 3) eta]], acting on
  /// (||X||_F^2, Tr[X]^2).
  Eigen::Matrix2d recurrence() const;
  Eigen::Matrix2d left() const;
  Eigen::Matrix2d diag() const;
  Eigen::Matrix2d right() const;
  /// left() * diag() * right().
  Eigen::Matrix2d reconstructed() const { return left() * diag() * right(); }
};

/// Requires n >= 2.
RheSpectralConstants rhe_constants(int n);

struct RheState {
  double frob_sq = 0.0;
  double trace_sq = 0.0;
};

/// Closed-form E||X_N||_F^2 and E Tr[X_N]^2 under N plain updates with exact
/// curvature. When lambda^N underflows the affected terms become 0 and
/// *underflow (if given) is set.
RheState rhe_exact_expectation(const RheState& state0, int n, std::int64_t N,
                               bool* underflow = nullptr);

/// The same pair by applying the 2x2 recurrence N times.
RheState rhe_recurrence(const RheState& state0, int n, std::int64_t N);

struct MarkovBound {
  double bound = 0.0;
  double probability = 0.0;
  double j = 0.0;
};

/// j solves (1 - 2/(n(n+2)))^j = b; bound = (1 - 2/(n(n+2)))^(N - j) frob0,
/// holding with probability 1 - b. Requires 0 < b < 1.
MarkovBound rhe_markov_bound(int n, std::int64_t N, double b, double frob0);

/// (d + c) / (1 - c). Requires 0 < a <= b, 0 <= c < 1, d >= 1.
double kappa_propagation(double a, double b, double c, double d);

}  // namespace vmrp
