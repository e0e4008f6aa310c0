#pragma once

#include <stdexcept>

#include <Eigen/Core>

namespace vmrp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Relative pivot tolerance for positive definiteness decisions.
inline constexpr double kPdTolerance = 1e-12;

class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense symmetric matrix. Symmetry is enforced at construction by averaging
/// the input with its transpose, so entries(i, j) == entries(j, i) exactly.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(const Matrix& entries);

  static SymmetricMatrix identity(Index n);
  static SymmetricMatrix diagonal(const Vector& d);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

 private:
  Matrix m_;
};

/// Symmetric positive definite matrix with its Cholesky factor and inverse
/// computed eagerly. Immutable after construction.
class PDMatrix {
 public:
  /// Throws NotPositiveDefinite when a Cholesky pivot falls below
  /// kPdTolerance times the largest diagonal entry.
  explicit PDMatrix(const SymmetricMatrix& base);
  explicit PDMatrix(const Matrix& entries) : PDMatrix(SymmetricMatrix(entries)) {}

  static PDMatrix identity(Index n);
  static PDMatrix diagonal(const Vector& d);

  Index dim() const { return base_.dim(); }
  const SymmetricMatrix& symmetric() const { return base_; }
  const Matrix& matrix() const { return base_.matrix(); }
  /// Lower-triangular L with L * L^T == matrix().
  const Matrix& factor() const { return factor_; }
  const Matrix& inverse() const { return inverse_; }

 private:
  SymmetricMatrix base_;
  Matrix factor_;
  Matrix inverse_;
};

struct EigExtremes {
  double min = 0.0;
  double max = 0.0;
};

/// x^T A x.
double quad_norm_sq(const Vector& x, const SymmetricMatrix& A);
double quad_norm_sq(const Vector& x, const PDMatrix& A);

EigExtremes eig_extremes(const SymmetricMatrix& A);
inline EigExtremes eig_extremes(const PDMatrix& A) { return eig_extremes(A.symmetric()); }

/// Principal square root via symmetric eigendecomposition.
Matrix pd_sqrt(const PDMatrix& A);
Matrix pd_inv_sqrt(const PDMatrix& A);

/// A^{1/2} B A^{1/2}: symmetric positive definite and similar to A*B, so it
/// carries the trace and spectrum of the (generally non-symmetric) product.
PDMatrix similar_product(const PDMatrix& A, const PDMatrix& B);

/// Extreme eigenvalues of B^{-1} A, computed from B^{-1/2} A B^{-1/2}.
EigExtremes generalized_eig_extremes(const PDMatrix& A, const PDMatrix& B);

/// lambda_max / lambda_min.
double condition_number(const PDMatrix& A);

/// ||y||^2_{(ABA)^{-1}} / ||y||^2_{A^{-1}}; lies in (0, 1/lambda_min(AB)].
double sigma_factor(const PDMatrix& A, const PDMatrix& B, const Vector& y);

/// Tr[A B] for symmetric A, B (equals Tr of the symmetric similar form).
double trace_product(const PDMatrix& A, const PDMatrix& B);

/// (Tr[AB] sigma_{A,B}(y) + 2) / (lambda_min(C) (n + 2)).
double kappa_E(const PDMatrix& A, const PDMatrix& B, const PDMatrix& C, const Vector& y);

/// (Tr[D] / lambda_min(D) + 2) / (lambda_min(C) (n + 2)). D must be given in
/// symmetric form; for a product A*B pass similar_product(A, B).
double kappa_T(const PDMatrix& D, const PDMatrix& C);
double kappa_T(const PDMatrix& D);

/// True iff a Cholesky factorization has every pivot above
/// kPdTolerance * max diagonal entry.
bool pd_check(const SymmetricMatrix& A);
bool pd_check(const Matrix& A);

/// Wedderburn criterion for B + t u u^T given b_inv_quad = u^T B^{-1} u > 0:
/// true iff 1 + t * b_inv_quad > kPdTolerance.
bool rank1_pd_criterion(double b_inv_quad, double t);

}  // namespace vmrp
