#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "vmrp/oracle.hpp"
#include "vmrp/sampling.hpp"

namespace vmrp {

/// Hessian estimate B with a maintained inverse. Rank-one updates go through
/// Sherman-Morrison while B stays positive definite; the inverse is rebuilt
/// from a fresh factorization every refactor_every updates, and whenever an
/// update leaves the positive definite cone.
class HessianEstimate {
 public:
  explicit HessianEstimate(const PDMatrix& B0, int refactor_every = 50);

  Index dim() const { return B_.rows(); }
  const Matrix& B() const { return B_; }
  /// Valid only when has_inverse().
  const Matrix& B_inv() const { return B_inv_; }
  bool has_inverse() const { return has_inverse_; }
  bool is_pd() const { return pd_; }
  std::uint64_t epoch() const { return epoch_; }

  /// B <- B + t u u^T.
  void rank1(const Vector& u, double t);
  /// Replace B wholesale (rebuilds the inverse).
  void reset(const Matrix& B);
  /// Lower Cholesky factor of B; throws NotPositiveDefinite if B is not PD.
  const Matrix& factor() const;
  /// ||B B_inv - I||_F.
  double inverse_residual() const;

 private:
  void refactor();

  Matrix B_;
  Matrix B_inv_;
  bool has_inverse_ = true;
  bool pd_ = true;
  std::uint64_t epoch_ = 0;
  int refactor_every_;
  int since_refactor_ = 0;
  mutable Matrix factor_;
  mutable std::uint64_t factor_epoch_ = ~std::uint64_t{0};
};

struct CurvatureSample {
  Vector u;
  double q = 0.0;
  std::int64_t stamp = 0;
};

/// Ring buffer of (direction, curvature) pairs; the oldest pair is evicted
/// when capacity is exceeded.
class CurvatureStore {
 public:
  explicit CurvatureStore(std::size_t capacity);
  void push(CurvatureSample s);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const CurvatureSample& operator[](std::size_t i) const { return items_[i]; }
  const std::deque<CurvatureSample>& items() const { return items_; }

 private:
  std::size_t capacity_;
  std::deque<CurvatureSample> items_;
};

/// (f(x + eps u) - 2 f(x) + f(x - eps u)) / eps^2 with f(x) = fx supplied.
/// Costs 2 evaluations. Throws std::runtime_error on non-finite values.
double curvature_fd(Oracle& f, const Vector& x, double fx, const Vector& u, double eps);

struct SmallestEig {
  double lambda = 0.0;
  Vector v;
};
SmallestEig smallest_eigvec(const SymmetricMatrix& A);

/// B_inv - t (B_inv u)(B_inv u)^T / (1 + t u^T B_inv u). Throws
/// std::domain_error when the denominator is at or below kPdTolerance.
Matrix sherman_morrison_inverse(const Matrix& B_inv, const Vector& u, double t);

struct UpdateOutcome {
  std::int64_t fes_used = 0;
  /// The correction branch (smallest eigenvector) ran.
  bool corrected = false;
  /// The update was discarded and B left unchanged.
  bool rejected = false;
  /// Plain update only: B left the positive definite cone.
  bool lost_pd = false;
  std::int64_t reuse_applied = 0;
  std::int64_t reuse_skipped = 0;
  /// Pairs measured during this update, for storage.
  std::vector<CurvatureSample> measured;
};

/// B <- B + (q - u^T B u) u u^T for unit u. No definiteness guarantee.
UpdateOutcome update_plain(HessianEstimate& est, const Vector& u, double q);

/// Corrected update: u ~ uniform on the sphere; if B + D_u u u^T is not PD,
/// add a curvature correction along its smallest eigenvector. Rejected (B
/// unchanged) if the result is still not PD.
UpdateOutcome update_corr(Oracle& f, const Vector& x, double fx, HessianEstimate& est, double eps,
                          SeededRng& rng);

/// update_corr, then push the measured pairs into the store, then (if reuse)
/// m passes over the store in random order applying each stored update that
/// keeps B positive definite.
UpdateOutcome update_store(Oracle& f, const Vector& x, double fx, HessianEstimate& est, double eps,
                           bool reuse, int m, CurvatureStore& store, SeededRng& rng,
                           std::int64_t stamp = 0);

/// Reuse passes alone (no new measurements, no evaluations).
void reuse_store(HessianEstimate& est, const CurvatureStore& store, int m, SeededRng& rng,
                 UpdateOutcome& outcome);

}  // namespace vmrp
