#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "vmrp/hessian.hpp"
#include "vmrp/linesearch.hpp"
#include "vmrp/objective.hpp"

namespace vmrp {

struct StopCriteria {
  /// Negative: unlimited.
  std::int64_t max_iterations = -1;
  /// Negative: unlimited. Use for_dimension() for the 200 n^2 default.
  std::int64_t max_fes = -1;
  /// Stop once f(x) - f* <= target_gap. Negative: never.
  double target_gap = 1e-8;

  static StopCriteria for_dimension(Index n);
  void validate() const;
};

/// Accuracy decades 10^1 down to 10^-8.
inline constexpr int kDecadeHigh = 1;
inline constexpr int kDecadeLow = -8;
inline constexpr int kDecadeCount = kDecadeHigh - kDecadeLow + 1;
inline double decade_threshold(int index) { return std::pow(10.0, kDecadeHigh - index); }

enum class StopReason { target, budget, iterations };
std::string stop_reason_name(StopReason r);
StopReason parse_stop_reason(const std::string& s);

struct TrajectoryRecord {
  std::int64_t iteration = 0;
  std::int64_t fes = 0;
  double fval = 0.0;
  double gap = 0.0;
  /// kappa(B^{-1} H); NaN when not computed.
  double kappa = std::numeric_limits<double>::quiet_NaN();
  /// Eigenvalues of B^{-1} (ascending); empty when not recorded.
  std::vector<double> spectrum;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  Vector x;
  StopReason stop_reason = StopReason::budget;
  std::int64_t iterations = 0;
  std::int64_t fes = 0;
  std::int64_t accepted_steps = 0;
  /// Hessian updates discarded to keep B positive definite.
  std::int64_t rejected_updates = 0;
  std::int64_t corrected_updates = 0;
  std::int64_t reuse_applied = 0;
  /// Cumulative FES when the gap first fell to each decade threshold; -1 if
  /// never. Tracked every iteration, independent of recording.
  std::vector<std::int64_t> decade_fes = std::vector<std::int64_t>(kDecadeCount, -1);
};

/// An oracle or update failure, carrying the trajectory up to the failure.
class PursuitError : public std::runtime_error {
 public:
  PursuitError(const std::string& what, Trajectory partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

struct RecordOptions {
  /// Record every k-th iteration (plus the first and last). 0: first/last only.
  std::int64_t every = 1;
  /// Compute kappa(B^{-1} H) every k-th recorded iteration; 0: never.
  std::int64_t kappa_every = 0;
  bool spectrum = false;
};

enum class UpdateScheme { plain, corr, store };
enum class UpdateAt { interlaced, fixed_point };
std::string update_scheme_name(UpdateScheme s);
UpdateScheme parse_update_scheme(const std::string& s);
std::string update_at_name(UpdateAt a);
UpdateAt parse_update_at(const std::string& s);

struct HessianUpdateConfig {
  UpdateScheme scheme = UpdateScheme::store;
  double eps = 1.0;
  bool reuse = true;
  int m = 10;
  /// 0: 2 n^2.
  std::int64_t capacity = 0;
  /// 0: n.
  std::int64_t reuse_every = 0;
  /// Negative: n^2.
  std::int64_t reuse_start = -1;
  /// interlaced: update at x_k. fixed_point: every update measures at x_0.
  UpdateAt update_at = UpdateAt::interlaced;

  void validate() const;
};

/// kappa(B^{-1} H) from the symmetric form B^{-1/2} H B^{-1/2}; NaN if that
/// form is not positive definite.
double kappa_BinvH(const Matrix& B, const Matrix& H);

/// Fixed metric random pursuit: u_k ~ N(0, Sigma) normalized, then a line
/// search along u_k.
Trajectory run_frp(ObjectiveInstance& f, const Vector& x0, const PDMatrix& Sigma, LineSearch& ls,
                   const StopCriteria& stop, SeededRng& rng, const RecordOptions& rec = {});

/// Variable metric random pursuit: one Hessian update per iteration followed
/// by a line search along u_k ~ N(0, B_k^{-1}) normalized.
Trajectory run_vrp(ObjectiveInstance& f, const Vector& x0, const PDMatrix& B0, LineSearch& ls,
                   const HessianUpdateConfig& update, const StopCriteria& stop, SeededRng& rng,
                   const RecordOptions& rec = {});

}  // namespace vmrp
