#include "vmrp/sampling.hpp"

#include <cmath>
#include <limits>

#include <Eigen/QR>

namespace vmrp {

std::uint64_t SeededRng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("SeededRng::below: bound must be positive");
  // Rejection keeps the result unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % bound;
}

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double a, b, s;
  do {
    a = 2.0 * uniform() - 1.0;
    b = 2.0 * uniform() - 1.0;
    s = a * a + b * b;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = b * scale;
  has_spare_ = true;
  return a * scale;
}

Vector SeededRng::normal_vector(Index n) {
  Vector z(n);
  for (Index i = 0; i < n; ++i) z(i) = normal();
  return z;
}

Matrix SeededRng::normal_matrix(Index rows, Index cols) {
  Matrix z(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) z(i, j) = normal();
  return z;
}

namespace {

// A standard normal draw with nonzero norm; redraws on the (measure zero)
// all-zero vector.
Vector nonzero_normal(Index n, SeededRng& rng, double& norm) {
  Vector z;
  do {
    z = rng.normal_vector(n);
    norm = z.norm();
  } while (norm == 0.0);
  return z;
}

}  // namespace

Direction sample_normalized(const Matrix& sigma_factor, SeededRng& rng) {
  double norm = 0.0;
  Vector z = nonzero_normal(sigma_factor.rows(), rng, norm);
  Vector u = sigma_factor.triangularView<Eigen::Lower>() * z;
  return {u / norm, 0};
}

Direction sample_from_precision(const Matrix& precision_factor, SeededRng& rng) {
  for (Index i = 0; i < precision_factor.rows(); ++i) {
    if (precision_factor(i, i) == 0.0) {
      throw std::invalid_argument("sample_from_precision: singular triangular factor");
    }
  }
  double norm = 0.0;
  Vector z = nonzero_normal(precision_factor.rows(), rng, norm);
  Vector u = precision_factor.triangularView<Eigen::Lower>().transpose().solve(z);
  return {u / norm, 0};
}

Vector sample_sphere(Index n, SeededRng& rng) {
  double norm = 0.0;
  Vector z = nonzero_normal(n, rng, norm);
  return z / norm;
}

Matrix haar_rotation(Index n, SeededRng& rng) {
  if (n < 1) throw std::invalid_argument("haar_rotation: n must be positive");
  const Matrix g = rng.normal_matrix(n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

namespace {

// Welford accumulator for one scalar stream.
struct Running {
  double mean = 0.0;
  double m2 = 0.0;
  void push(double x, double count) {
    const double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
  }
  double standard_error(double count) const {
    if (count < 2.0) return 0.0;
    return std::sqrt(m2 / (count - 1.0) / count);
  }
};

}  // namespace

MomentEstimate estimate_moments(const PDMatrix& sigma, const SymmetricMatrix& A, const Vector& x,
                                std::int64_t samples, SeededRng& rng, MomentSampling mode) {
  if (samples < 1) throw std::invalid_argument("estimate_moments: samples must be positive");
  const Index n = sigma.dim();
  if (A.dim() != n || x.size() != n) {
    throw std::invalid_argument("estimate_moments: dimension mismatch");
  }
  std::vector<Running> outer(static_cast<std::size_t>(n * n));
  std::vector<Running> projection(static_cast<std::size_t>(n));
  Running quad, quad_sq, projection_norm;
  const Matrix& c = sigma.factor();

  for (std::int64_t s = 1; s <= samples; ++s) {
    Vector v;
    if (mode == MomentSampling::normalized) {
      v = sample_normalized(c, rng).u;
    } else {
      v = c.triangularView<Eigen::Lower>() * rng.normal_vector(n);
    }
    const double count = static_cast<double>(s);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) outer[static_cast<std::size_t>(j * n + i)].push(v(i) * v(j), count);
    const double q = v.dot(A.matrix() * v);
    quad.push(q, count);
    quad_sq.push(q * q, count);
    const double xv = x.dot(v);
    for (Index i = 0; i < n; ++i) projection[static_cast<std::size_t>(i)].push(xv * v(i), count);
    projection_norm.push(xv * xv * q, count);
  }

  const double count = static_cast<double>(samples);
  MomentEstimate est;
  est.samples = samples;
  est.mean.outer.resize(n, n);
  est.standard_error.outer.resize(n, n);
  est.mean.projection.resize(n);
  est.standard_error.projection.resize(n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const auto& r = outer[static_cast<std::size_t>(j * n + i)];
      est.mean.outer(i, j) = r.mean;
      est.standard_error.outer(i, j) = r.standard_error(count);
    }
  }
  for (Index i = 0; i < n; ++i) {
    const auto& r = projection[static_cast<std::size_t>(i)];
    est.mean.projection(i) = r.mean;
    est.standard_error.projection(i) = r.standard_error(count);
  }
  est.mean.quad = quad.mean;
  est.standard_error.quad = quad.standard_error(count);
  est.mean.quad_sq = quad_sq.mean;
  est.standard_error.quad_sq = quad_sq.standard_error(count);
  est.mean.projection_norm = projection_norm.mean;
  est.standard_error.projection_norm = projection_norm.standard_error(count);
  return est;
}

MomentValues expected_moments(const PDMatrix& sigma, const SymmetricMatrix& A, const Vector& x,
                              MomentSampling mode) {
  const Index n = sigma.dim();
  if (A.dim() != n || x.size() != n) {
    throw std::invalid_argument("expected_moments: dimension mismatch");
  }
  const double nd = static_cast<double>(n);
  const double first = mode == MomentSampling::normalized ? nd : 1.0;
  const double second = mode == MomentSampling::normalized ? nd * (nd + 2.0) : 1.0;

  const Matrix& s = sigma.matrix();
  const Matrix as = A.matrix() * s;
  const double tr = as.trace();
  const double tr_sq = (as * as).trace();
  const Vector sx = s * x;

  MomentValues m;
  m.outer = s / first;
  m.quad = tr / first;
  m.quad_sq = (tr * tr + 2.0 * tr_sq) / second;
  m.projection = sx / first;
  m.projection_norm = (tr * x.dot(sx) + 2.0 * sx.dot(A.matrix() * sx)) / second;
  return m;
}

}  // namespace vmrp
