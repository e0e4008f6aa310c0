#include "vmrp/metric.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace vmrp {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix is not square");
  }
}

void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

// Plain Cholesky with an explicit pivot threshold. Returns nullopt on a pivot
// at or below the threshold.
std::optional<Matrix> guarded_cholesky(const Matrix& a) {
  const Index n = a.rows();
  if (n == 0) return Matrix(0, 0);
  const double max_diag = a.diagonal().maxCoeff();
  if (!(max_diag > 0.0)) return std::nullopt;
  const double threshold = kPdTolerance * max_diag;

  Matrix l = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double pivot = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > threshold)) return std::nullopt;
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (Index i = j + 1; i < n; ++i) {
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / ljj;
    }
  }
  return l;
}

}  // namespace

SymmetricMatrix::SymmetricMatrix(const Matrix& entries) {
  require_square(entries, "SymmetricMatrix");
  m_ = 0.5 * (entries + entries.transpose());
}

SymmetricMatrix SymmetricMatrix::identity(Index n) {
  return SymmetricMatrix(Matrix::Identity(n, n));
}

SymmetricMatrix SymmetricMatrix::diagonal(const Vector& d) {
  return SymmetricMatrix(Matrix(d.asDiagonal()));
}

PDMatrix::PDMatrix(const SymmetricMatrix& base) : base_(base) {
  auto l = guarded_cholesky(base_.matrix());
  if (!l) throw NotPositiveDefinite("PDMatrix: matrix is not positive definite");
  factor_ = std::move(*l);
  const Index n = base_.dim();
  Matrix linv = factor_.triangularView<Eigen::Lower>().solve(Matrix::Identity(n, n));
  Matrix inv = linv.transpose() * linv;
  inverse_ = 0.5 * (inv + inv.transpose());
}

PDMatrix PDMatrix::identity(Index n) { return PDMatrix(SymmetricMatrix::identity(n)); }

PDMatrix PDMatrix::diagonal(const Vector& d) { return PDMatrix(SymmetricMatrix::diagonal(d)); }

double quad_norm_sq(const Vector& x, const SymmetricMatrix& A) {
  require_same_dim(x.size(), A.dim(), "quad_norm_sq");
  return x.dot(A.matrix() * x);
}

double quad_norm_sq(const Vector& x, const PDMatrix& A) { return quad_norm_sq(x, A.symmetric()); }

EigExtremes eig_extremes(const SymmetricMatrix& A) {
  if (A.dim() == 0) throw std::invalid_argument("eig_extremes: empty matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> es(A.matrix(), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev(0), ev(ev.size() - 1)};
}

Matrix pd_sqrt(const PDMatrix& A) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(A.matrix());
  Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Matrix s = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (s + s.transpose());
}

Matrix pd_inv_sqrt(const PDMatrix& A) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(A.matrix());
  Vector root = es.eigenvalues().cwiseSqrt().cwiseInverse();
  Matrix s = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (s + s.transpose());
}

PDMatrix similar_product(const PDMatrix& A, const PDMatrix& B) {
  require_same_dim(A.dim(), B.dim(), "similar_product");
  const Matrix root = pd_sqrt(A);
  return PDMatrix(SymmetricMatrix(root * B.matrix() * root));
}

EigExtremes generalized_eig_extremes(const PDMatrix& A, const PDMatrix& B) {
  require_same_dim(A.dim(), B.dim(), "generalized_eig_extremes");
  const Matrix inv_root = pd_inv_sqrt(B);
  return eig_extremes(SymmetricMatrix(inv_root * A.matrix() * inv_root));
}

double condition_number(const PDMatrix& A) {
  const auto e = eig_extremes(A);
  return e.max / e.min;
}

double sigma_factor(const PDMatrix& A, const PDMatrix& B, const Vector& y) {
  require_same_dim(A.dim(), B.dim(), "sigma_factor");
  require_same_dim(y.size(), A.dim(), "sigma_factor");
  if (y.squaredNorm() == 0.0) throw std::invalid_argument("sigma_factor: zero vector");
  // (ABA)^{-1} = A^{-1} B^{-1} A^{-1}, so the numerator is w^T B^{-1} w for w = A^{-1} y.
  const Vector w = A.inverse() * y;
  const double numerator = w.dot(B.inverse() * w);
  const double denominator = y.dot(w);
  return numerator / denominator;
}

double trace_product(const PDMatrix& A, const PDMatrix& B) {
  require_same_dim(A.dim(), B.dim(), "trace_product");
  return A.matrix().cwiseProduct(B.matrix()).sum();
}

double kappa_E(const PDMatrix& A, const PDMatrix& B, const PDMatrix& C, const Vector& y) {
  require_same_dim(A.dim(), C.dim(), "kappa_E");
  const double n = static_cast<double>(A.dim());
  const double sigma = sigma_factor(A, B, y);
  return (trace_product(A, B) * sigma + 2.0) / (eig_extremes(C).min * (n + 2.0));
}

double kappa_T(const PDMatrix& D, const PDMatrix& C) {
  require_same_dim(D.dim(), C.dim(), "kappa_T");
  const double n = static_cast<double>(D.dim());
  const double trace = D.matrix().trace();
  return (trace / eig_extremes(D).min + 2.0) / (eig_extremes(C).min * (n + 2.0));
}

double kappa_T(const PDMatrix& D) {
  const double n = static_cast<double>(D.dim());
  return (D.matrix().trace() / eig_extremes(D).min + 2.0) / (n + 2.0);
}

bool pd_check(const Matrix& A) {
  if (A.rows() != A.cols()) return false;
  return guarded_cholesky(A).has_value();
}

bool pd_check(const SymmetricMatrix& A) { return pd_check(A.matrix()); }

bool rank1_pd_criterion(double b_inv_quad, double t) {
  if (!(b_inv_quad > 0.0)) {
    throw std::invalid_argument("rank1_pd_criterion: u^T B^{-1} u must be positive");
  }
  return 1.0 + t * b_inv_quad > kPdTolerance;
}

}  // namespace vmrp
