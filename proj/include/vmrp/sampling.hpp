#pragma once

#include <cstdint>
#include <random>

#include "vmrp/metric.hpp"

namespace vmrp {

/// Seeded random stream. mt19937_64 supplies the bits; uniforms and normals are
/// derived here rather than through <random> distributions, whose output is
/// implementation-defined.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal (Marsaglia polar method).
  double normal();
  Vector normal_vector(Index n);
  Matrix normal_matrix(Index rows, Index cols);

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// A search direction of unit length in the metric of the precision matrix it
/// was drawn for. metric_tag identifies that metric (for example an estimate's
/// update epoch); 0 means "caller did not tag it".
struct Direction {
  Vector u;
  std::uint64_t metric_tag = 0;
};

/// Draw from the normalized distribution N(0, Sigma) / ||.||_{Sigma^{-1}}
/// given lower-triangular C with C C^T = Sigma: returns C z / ||z||_2.
Direction sample_normalized(const Matrix& sigma_factor, SeededRng& rng);

/// Draw from the normalized distribution with covariance B^{-1} given
/// lower-triangular L with L L^T = B: returns L^{-T} z / ||z||_2, so that
/// ||u||_B = 1. B^{-1} is never formed.
Direction sample_from_precision(const Matrix& precision_factor, SeededRng& rng);

/// Uniform on the Euclidean unit sphere.
Vector sample_sphere(Index n, SeededRng& rng);

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs
/// of R's diagonal absorbed into Q's columns.
Matrix haar_rotation(Index n, SeededRng& rng);

/// The five moments of a direction v (for x and A fixed):
/// v v^T, v^T A v, (v^T A v)^2, <x,v> v, ||<x,v> v||_A^2.
struct MomentValues {
  Matrix outer;
  double quad = 0.0;
  double quad_sq = 0.0;
  Vector projection;
  double projection_norm = 0.0;
};

/// Sample means with per-entry standard errors.
struct MomentEstimate {
  MomentValues mean;
  MomentValues standard_error;
  std::int64_t samples = 0;
};

enum class MomentSampling {
  normalized,  // v ~ N(0, Sigma) / ||.||_{Sigma^{-1}}
  gaussian,    // u ~ N(0, Sigma)
};

MomentEstimate estimate_moments(const PDMatrix& sigma, const SymmetricMatrix& A, const Vector& x,
                                std::int64_t samples, SeededRng& rng,
                                MomentSampling mode = MomentSampling::normalized);

/// Closed-form expectations of the five moments: for the normalized
/// distribution Sigma/n, Tr[A Sigma]/n, (Tr[A Sigma]^2 + 2 Tr[(A Sigma)^2])/(n(n+2)),
/// Sigma x / n and (Tr[A Sigma] ||x||^2_Sigma + 2 ||x||^2_{Sigma A Sigma})/(n(n+2));
/// the Gaussian versions drop the n and n(n+2) denominators.
MomentValues expected_moments(const PDMatrix& sigma, const SymmetricMatrix& A, const Vector& x,
                              MomentSampling mode = MomentSampling::normalized);

}  // namespace vmrp
