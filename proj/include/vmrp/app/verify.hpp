#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vmrp::app {

/// One verification outcome: passed iff measured <= tolerance unless the
/// check states otherwise in its detail.
struct Check {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<Check> checks;
  bool passed() const;
};

/// Normalized and Gaussian moment identities: scalar moments pass when
/// |mean - exact| <= 3 se; matrix and vector moments when
/// ||mean - exact|| <= 3 sqrt(sum of squared entry se).
std::vector<Check> check_moments(const std::vector<int>& dims, std::int64_t samples,
                                 std::uint64_t seed);

/// Closed form vs 2x2 iteration vs simulated plain updates, plus the
/// (1 - 2/(n(n+2)))^N upper bound, for a traceless X0 and X0 = c I.
std::vector<Check> check_rhe_exact(int n, std::int64_t N, std::int64_t runs,
                                   const std::vector<std::int64_t>& checkpoints,
                                   std::uint64_t seed);

/// One-step expected Frobenius progress of the plain update at fixed (B, H).
std::vector<Check> check_single_step(int n, std::int64_t samples, std::uint64_t seed);

/// Reconstruction of the recurrence matrix from its factorization.
std::vector<Check> check_diag(int n_min, int n_max);

/// Repeated corrected updates on the quadratic f3 model from B0 = (ell/2) I.
std::vector<Check> check_pd(int n, double ell, std::int64_t steps, std::uint64_t seed);

/// kappa(H^{-1} B) <= (d + c)/(1 - c) on constructed instances.
std::vector<Check> check_propagation(int instances, std::uint64_t seed);

/// E_{u ~ U}[(u^T X u)^2] >= ratio * (Tr[X]^2 + 2||X||_F^2)/(n(n+2)) for a
/// stored set U of h normalized directions, one fresh U per (B, H) pair.
std::vector<Check> check_store_concentration(int n, int h, int pairs, double ratio,
                                             double required_fraction, std::uint64_t seed);

/// Suites: moments, rhe-exact, diag, pd, propagation, all. samples scales the
/// Monte-Carlo sizes (0: defaults). Throws std::invalid_argument on an unknown
/// suite name.
VerifyReport run_suite(const std::string& suite, std::uint64_t seed, std::int64_t samples);

std::string report_to_json(const VerifyReport& r);

}  // namespace vmrp::app
