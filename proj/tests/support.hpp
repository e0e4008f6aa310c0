#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "vmrp/sampling.hpp"

namespace vmrp::testing {

// Q diag(spectrum) Q^T with Haar Q.
inline Matrix random_spd(Index n, double lo, double hi, SeededRng& rng) {
  const Matrix Q = haar_rotation(n, rng);
  Vector d(n);
  for (Index i = 0; i < n; ++i) d(i) = lo + (hi - lo) * rng.uniform();
  return Q * d.asDiagonal() * Q.transpose();
}

inline Matrix random_symmetric(Index n, SeededRng& rng) {
  const Matrix G = rng.normal_matrix(n, n);
  return 0.5 * (G + G.transpose());
}

inline Vector eigenvalues(const Matrix& A) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (A + A.transpose())).eigenvalues();
}

// Eigenvalues of B^{-1} A via the generalized symmetric solver.
inline Vector generalized_eigenvalues(const Matrix& A, const Matrix& B) {
  return Eigen::GeneralizedSelfAdjointEigenSolver<Matrix>(A, B).eigenvalues();
}

// prod (1 - a / (sigma_k + b)) and its Jensen bound exp(-a N / (mean sigma + b)).
struct JensenPair {
  double product = 1.0;
  double bound = 1.0;
};

inline JensenPair jensen_product(const std::vector<double>& sigma, double a, double b) {
  JensenPair p;
  double sum = 0.0;
  for (double s : sigma) {
    p.product *= 1.0 - a / (s + b);
    sum += s;
  }
  const double N = static_cast<double>(sigma.size());
  p.bound = std::exp(-a * N / (sum / N + b));
  return p;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
  double s = 0.0, s2 = 0.0;
  for (double x : v) s += x;
  const double n = static_cast<double>(v.size());
  const double m = s / n;
  for (double x : v) s2 += (x - m) * (x - m);
  return {m, std::sqrt(s2 / (n - 1.0) / n)};
}

}  // namespace vmrp::testing
