#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vmrp/pursuit.hpp"

namespace vmrp {

enum class Algorithm { frp, vrp };
std::string algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& s);

/// Initial Sigma (F-RP) or B0 (V-RP).
struct MetricInit {
  enum class Kind { identity, scaled, matrix };
  Kind kind = Kind::identity;
  double value = 1.0;
  Matrix matrix;

  PDMatrix build(Index n) const;
};

enum class StartPoint { canonical, som };

/// Finite-difference step default per family: 1 for quadratics, 1e-6 else.
double default_eps(Family f);

struct ExperimentConfig {
  FamilyParams function;
  bool transform = true;
  StartPoint start = StartPoint::canonical;
  Algorithm algorithm = Algorithm::frp;
  MetricInit init;
  LineSearchSpec linesearch = ExactLineSearch{};
  HessianUpdateConfig update;
  /// Negative: 200 n^2.
  std::int64_t budget_fes = -1;
  double target_gap = 1e-8;
  std::int64_t max_iterations = -1;
  int trials = 31;
  std::uint64_t seed = 1;
  /// 0: hardware concurrency.
  int threads = 0;
  RecordOptions record;
  bool timing = false;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  std::int64_t effective_budget() const;
};

struct TrialSummary {
  int trial_index = 0;
  std::uint64_t seed = 0;
  /// Decades 10^1 .. 10^-8; absent when unreached.
  std::vector<std::optional<std::int64_t>> fes_to_accuracy;
  bool reached_target = false;
  StopReason stop_reason = StopReason::budget;
  std::int64_t iterations = 0;
  std::int64_t fes = 0;
  double final_gap = 0.0;
  std::int64_t rejected_updates = 0;
  std::int64_t corrected_updates = 0;
  bool three_phase = false;
  std::optional<std::int64_t> learning_phase_end;
  /// Seconds; only when timing is requested.
  std::optional<double> wall_time;
  /// Non-empty if the trial failed.
  std::string error;

  bool operator==(const TrialSummary&) const = default;
};

struct TrialResult {
  TrialSummary summary;
  Trajectory trajectory;
};

struct PhaseEstimate {
  bool three_phase = false;
  std::optional<std::int64_t> learning_phase_end;
};

/// Rolling log10-gap slope over a window of `window` iterations. The final
/// slope is the slope of the last window. The learning phase is a stretch
/// where the slope is flatter than half the final slope, preceded and
/// followed by steeper stretches; its end is the first window after it whose
/// slope is at least half as steep as the final one.
PhaseEstimate detect_phases(const std::vector<TrajectoryRecord>& records, std::int64_t window);

/// Runs config.trials trials (seed = config.seed + trial) on a worker pool and
/// returns results ordered by trial index.
std::vector<TrialResult> run_experiment(const ExperimentConfig& config);

struct DecadeStats {
  int reached = 0;
  /// FES / n^2 over the trials that reached the decade.
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;

  bool operator==(const DecadeStats&) const = default;
};

struct ExperimentSummary {
  int n = 0;
  int trials = 0;
  std::vector<DecadeStats> decades;
  int reached_target = 0;
  double mean_final_gap = 0.0;
  double median_final_gap = 0.0;
  int stop_target = 0;
  int stop_budget = 0;
  int stop_iterations = 0;
  int failed = 0;
  int three_phase = 0;
  std::optional<double> mean_learning_phase_end;

  bool operator==(const ExperimentSummary&) const = default;
};

ExperimentSummary aggregate(const std::vector<TrialSummary>& trials, Index n);

double median(std::vector<double> v);

struct PlotRow {
  std::int64_t iteration = 0;
  double mean_gap = 0.0;
  double min_gap = 0.0;
  double max_gap = 0.0;
};

/// Mean, min and max gap across trials on a common iteration grid. Trials
/// that stopped early contribute their last gap.
std::vector<PlotRow> plot_data(const std::vector<TrialResult>& results);

}  // namespace vmrp
