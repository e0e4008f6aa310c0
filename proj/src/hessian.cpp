#include "vmrp/hessian.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace vmrp {

HessianEstimate::HessianEstimate(const PDMatrix& B0, int refactor_every)
    : B_(B0.matrix()), B_inv_(B0.inverse()), refactor_every_(refactor_every) {
  if (refactor_every < 1) throw std::invalid_argument("HessianEstimate: refactor_every must be positive");
}

void HessianEstimate::refactor() {
  since_refactor_ = 0;
  const Index n = dim();
  pd_ = pd_check(B_);
  if (pd_) {
    Eigen::LLT<Matrix> llt(B_);
    Matrix inv = llt.solve(Matrix::Identity(n, n));
    B_inv_ = 0.5 * (inv + inv.transpose());
    has_inverse_ = true;
    return;
  }
  Eigen::FullPivLU<Matrix> lu(B_);
  has_inverse_ = lu.isInvertible();
  if (has_inverse_) {
    Matrix inv = lu.inverse();
    B_inv_ = 0.5 * (inv + inv.transpose());
  }
}

void HessianEstimate::rank1(const Vector& u, double t) {
  if (u.size() != dim()) throw std::invalid_argument("HessianEstimate::rank1: dimension mismatch");
  ++epoch_;
  if (t == 0.0) return;
  B_.noalias() += t * u * u.transpose();
  // Keep exact symmetry.
  B_ = 0.5 * (B_ + B_.transpose()).eval();
  if (pd_ && has_inverse_) {
    const Vector w = B_inv_ * u;
    const double den = 1.0 + t * u.dot(w);
    if (den > kPdTolerance && ++since_refactor_ < refactor_every_) {
      B_inv_.noalias() -= (t / den) * w * w.transpose();
      return;
    }
  }
  refactor();
}

void HessianEstimate::reset(const Matrix& B) {
  if (B.rows() != dim() || B.cols() != dim()) {
    throw std::invalid_argument("HessianEstimate::reset: dimension mismatch");
  }
  B_ = 0.5 * (B + B.transpose());
  ++epoch_;
  refactor();
}

const Matrix& HessianEstimate::factor() const {
  if (factor_epoch_ != epoch_) {
    if (!pd_) throw NotPositiveDefinite("HessianEstimate::factor: estimate is not positive definite");
    Eigen::LLT<Matrix> llt(B_);
    if (llt.info() != Eigen::Success) {
      throw NotPositiveDefinite("HessianEstimate::factor: Cholesky failed");
    }
    factor_ = llt.matrixL();
    factor_epoch_ = epoch_;
  }
  return factor_;
}

double HessianEstimate::inverse_residual() const {
  if (!has_inverse_) return std::numeric_limits<double>::infinity();
  return (B_ * B_inv_ - Matrix::Identity(dim(), dim())).norm();
}

CurvatureStore::CurvatureStore(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("CurvatureStore: capacity must be positive");
}

void CurvatureStore::push(CurvatureSample s) {
  items_.push_back(std::move(s));
  while (items_.size() > capacity_) items_.pop_front();
}

double curvature_fd(Oracle& f, const Vector& x, double fx, const Vector& u, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("curvature_fd: eps must be positive");
  const double fp = f.value(x + eps * u);
  const double fm = f.value(x - eps * u);
  const double q = (fp - 2.0 * fx + fm) / (eps * eps);
  if (!std::isfinite(q)) throw std::runtime_error("curvature_fd: non-finite function value");
  return q;
}

SmallestEig smallest_eigvec(const SymmetricMatrix& A) {
  if (A.dim() == 0) throw std::invalid_argument("smallest_eigvec: empty matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> es(A.matrix());
  if (es.info() != Eigen::Success) throw std::runtime_error("smallest_eigvec: eigensolver failed");
  SmallestEig r;
  r.lambda = es.eigenvalues()(0);
  r.v = es.eigenvectors().col(0).normalized();
  return r;
}

Matrix sherman_morrison_inverse(const Matrix& B_inv, const Vector& u, double t) {
  if (B_inv.rows() != u.size() || B_inv.cols() != u.size()) {
    throw std::invalid_argument("sherman_morrison_inverse: dimension mismatch");
  }
  const Vector w = B_inv * u;
  const double den = 1.0 + t * u.dot(w);
  if (!(den > kPdTolerance)) throw std::domain_error("sherman_morrison_inverse: denominator below tolerance");
  Matrix r = B_inv - (t / den) * w * w.transpose();
  return 0.5 * (r + r.transpose());
}

UpdateOutcome update_plain(HessianEstimate& est, const Vector& u, double q) {
  if (u.size() != est.dim()) throw std::invalid_argument("update_plain: dimension mismatch");
  if (std::abs(u.squaredNorm() - 1.0) > 1e-10) throw std::invalid_argument("update_plain: u must be a unit vector");
  UpdateOutcome out;
  const bool was_pd = est.is_pd();
  est.rank1(u, q - u.dot(est.B() * u));
  out.lost_pd = was_pd && !est.is_pd();
  out.measured.push_back({u, q, 0});
  return out;
}

UpdateOutcome update_corr(Oracle& f, const Vector& x, double fx, HessianEstimate& est, double eps,
                          SeededRng& rng) {
  if (!est.is_pd()) throw NotPositiveDefinite("update_corr: estimate must be positive definite");
  UpdateOutcome out;
  const Vector u = sample_sphere(est.dim(), rng);
  const double q_u = curvature_fd(f, x, fx, u, eps);
  out.fes_used += 2;
  out.measured.push_back({u, q_u, 0});
  const double delta_u = q_u - u.dot(est.B() * u);

  if (rank1_pd_criterion(u.dot(est.B_inv() * u), delta_u)) {
    est.rank1(u, delta_u);
    if (est.is_pd()) return out;
    // Criterion passed but factorization disagrees: undo by rebuilding.
    est.rank1(u, -delta_u);
    out.rejected = true;
    return out;
  }

  out.corrected = true;
  const Matrix T = est.B() + delta_u * u * u.transpose();
  const SmallestEig se = smallest_eigvec(SymmetricMatrix(T));
  const double q_v = curvature_fd(f, x, fx, se.v, eps);
  out.fes_used += 2;
  out.measured.push_back({se.v, q_v, 0});
  const double delta_v = q_v - se.v.dot(T * se.v);
  const Matrix candidate = T + delta_v * se.v * se.v.transpose();
  if (!pd_check(SymmetricMatrix(candidate))) {
    out.rejected = true;
    return out;
  }
  est.reset(candidate);
  return out;
}

void reuse_store(HessianEstimate& est, const CurvatureStore& store, int m, SeededRng& rng,
                 UpdateOutcome& outcome) {
  if (m < 0) throw std::invalid_argument("reuse_store: m must be non-negative");
  std::vector<std::size_t> order(store.size());
  for (int pass = 0; pass < m; ++pass) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);
    }
    for (std::size_t idx : order) {
      const CurvatureSample& s = store[idx];
      const double t = s.q - s.u.dot(est.B() * s.u);
      if (est.is_pd() && est.has_inverse() && rank1_pd_criterion(s.u.dot(est.B_inv() * s.u), t)) {
        est.rank1(s.u, t);
        if (!est.is_pd()) {
          est.rank1(s.u, -t);
          ++outcome.reuse_skipped;
        } else {
          ++outcome.reuse_applied;
        }
      } else {
        ++outcome.reuse_skipped;
      }
    }
  }
}

UpdateOutcome update_store(Oracle& f, const Vector& x, double fx, HessianEstimate& est, double eps,
                           bool reuse, int m, CurvatureStore& store, SeededRng& rng,
                           std::int64_t stamp) {
  if (m < 0) throw std::invalid_argument("update_store: m must be non-negative");
  UpdateOutcome out = update_corr(f, x, fx, est, eps, rng);
  for (CurvatureSample s : out.measured) {
    s.stamp = stamp;
    store.push(std::move(s));
  }
  if (reuse) reuse_store(est, store, m, rng, out);
  return out;
}

}  // namespace vmrp
