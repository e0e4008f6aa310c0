#include "vmrp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace vmrp {

std::string algorithm_name(Algorithm a) { return a == Algorithm::frp ? "frp" : "vrp"; }

Algorithm parse_algorithm(const std::string& s) {
  if (s == "frp") return Algorithm::frp;
  if (s == "vrp") return Algorithm::vrp;
  throw std::invalid_argument("unknown algorithm '" + s + "'");
}

PDMatrix MetricInit::build(Index n) const {
  switch (kind) {
    case Kind::identity: return PDMatrix::identity(n);
    case Kind::scaled: return PDMatrix(Matrix(value * Matrix::Identity(n, n)));
    case Kind::matrix:
      if (matrix.rows() != n || matrix.cols() != n) {
        throw std::invalid_argument("init: matrix dimension does not match n");
      }
      return PDMatrix(matrix);
  }
  throw std::invalid_argument("init: unknown kind");
}

double default_eps(Family f) { return f == Family::f2 ? 1e-6 : 1.0; }

void ExperimentConfig::validate() const {
  if (function.n < 2) throw std::invalid_argument("n: must be at least 2");
  if (function.family != Family::f2 && !(function.ell >= 1.0 && std::isfinite(function.ell))) {
    throw std::invalid_argument("ell: must be a finite value >= 1");
  }
  if (function.family == Family::g && (function.i < 1 || function.i >= function.n)) {
    throw std::invalid_argument("i: must satisfy 1 <= i < n");
  }
  if (start == StartPoint::som && function.family != Family::f3 && function.family != Family::f4) {
    throw std::invalid_argument("start: the som preset is only defined for f3 and f4");
  }
  if (init.kind == MetricInit::Kind::scaled && !(init.value > 0.0)) {
    throw std::invalid_argument("init: scale must be positive");
  }
  if (init.kind == MetricInit::Kind::matrix) init.build(function.n);
  if (const auto* b = std::get_if<BisectionLineSearch>(&linesearch)) {
    if (!(b->mu > 0.0 && b->mu <= 1.0)) throw std::invalid_argument("mu: must lie in (0, 1]");
    if (b->max_fes < 2) throw std::invalid_argument("ls_max_fes: must be at least 2");
  }
  if (const auto* e = std::get_if<AdaptiveEsLineSearch>(&linesearch)) {
    if (!(e->initial.sigma > 0.0)) throw std::invalid_argument("sigma0: must be positive");
    if (!(e->initial.target_p > 0.0 && e->initial.target_p < 1.0)) {
      throw std::invalid_argument("target_p: must lie in (0, 1)");
    }
  }
  if (!(update.eps > 0.0)) throw std::invalid_argument("eps: must be positive");
  if (update.m < 0) throw std::invalid_argument("m: must be non-negative");
  if (update.capacity < 0) throw std::invalid_argument("capacity: must be non-negative");
  if (budget_fes == 0) throw std::invalid_argument("budget: must be positive");
  if (trials < 1) throw std::invalid_argument("trials: must be positive");
  if (threads < 0) throw std::invalid_argument("threads: must be non-negative");
  if (record.every < 0) throw std::invalid_argument("record_every: must be non-negative");
  if (record.kappa_every < 0) throw std::invalid_argument("kappa_every: must be non-negative");
}

std::int64_t ExperimentConfig::effective_budget() const {
  if (budget_fes > 0) return budget_fes;
  const auto n = static_cast<std::int64_t>(function.n);
  return 200 * n * n;
}

PhaseEstimate detect_phases(const std::vector<TrajectoryRecord>& records, std::int64_t window) {
  PhaseEstimate est;
  if (window < 1 || records.size() < 3) return est;
  const std::size_t m = records.size();
  std::vector<double> y(m);
  for (std::size_t i = 0; i < m; ++i) y[i] = std::log10(std::max(records[i].gap, 1e-300));

  // slope[i] over [it_i - window, it_i], NaN where undefined.
  std::vector<double> slope(m, std::numeric_limits<double>::quiet_NaN());
  std::size_t j = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::int64_t it = records[i].iteration;
    if (it - records[0].iteration < window) continue;
    while (j + 1 < i && records[j + 1].iteration <= it - window) ++j;
    const double span = static_cast<double>(it - records[j].iteration);
    if (span > 0.0) slope[i] = (y[i] - y[j]) / span;
  }
  const double final_slope = slope[m - 1];
  if (!(final_slope < 0.0)) return est;
  const double threshold = 0.5 * final_slope;

  std::size_t i = 0;
  while (i < m && std::isnan(slope[i])) ++i;
  if (i == m) return est;
  const bool initial_steep = slope[i] <= threshold;
  // Skip the initial steep stretch, then the slow one.
  while (i < m && slope[i] <= threshold) ++i;
  while (i < m && slope[i] > threshold) ++i;
  if (i == m) return est;
  est.learning_phase_end = records[i].iteration;
  est.three_phase = initial_steep;
  return est;
}

namespace {

TrialResult run_trial(const ExperimentConfig& c, int trial) {
  const auto start_time = std::chrono::steady_clock::now();
  TrialResult out;
  TrialSummary& s = out.summary;
  s.trial_index = trial;
  s.seed = c.seed + static_cast<std::uint64_t>(trial);
  SeededRng rng(s.seed);

  ObjectiveInstance f = make_objective(c.function);
  if (c.transform) f = transform_instance(f, rng);
  const Vector canonical = c.start == StartPoint::som ? f.som_start() : f.canonical_start();
  const Vector x0 = f.transform_point(canonical);
  const PDMatrix metric = c.init.build(c.function.n);
  LineSearch ls(c.linesearch);
  StopCriteria stop;
  stop.max_fes = c.effective_budget();
  stop.max_iterations = c.max_iterations;
  stop.target_gap = c.target_gap;

  try {
    out.trajectory = c.algorithm == Algorithm::frp
                         ? run_frp(f, x0, metric, ls, stop, rng, c.record)
                         : run_vrp(f, x0, metric, ls, c.update, stop, rng, c.record);
  } catch (const PursuitError& e) {
    out.trajectory = e.partial();
    s.error = e.what();
  }

  const Trajectory& t = out.trajectory;
  s.fes_to_accuracy.resize(kDecadeCount);
  for (int d = 0; d < kDecadeCount; ++d) {
    const std::int64_t v = t.decade_fes[static_cast<std::size_t>(d)];
    if (v >= 0) s.fes_to_accuracy[static_cast<std::size_t>(d)] = v;
  }
  s.stop_reason = t.stop_reason;
  s.reached_target = s.error.empty() && t.stop_reason == StopReason::target;
  s.iterations = t.iterations;
  s.fes = t.fes;
  s.final_gap = t.records.empty() ? 0.0 : t.records.back().gap;
  s.rejected_updates = t.rejected_updates;
  s.corrected_updates = t.corrected_updates;
  const PhaseEstimate ph = detect_phases(t.records, 2 * static_cast<std::int64_t>(c.function.n));
  s.three_phase = ph.three_phase;
  s.learning_phase_end = ph.learning_phase_end;
  if (c.timing) {
    s.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  }
  return out;
}

}  // namespace

std::vector<TrialResult> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const int trials = config.trials;
  std::vector<TrialResult> results(static_cast<std::size_t>(trials));
  int threads = config.threads > 0 ? config.threads
                                   : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, trials);

  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(trials));
  auto worker = [&]() {
    for (int i = next++; i < trials; i = next++) {
      try {
        results[static_cast<std::size_t>(i)] = run_trial(config, i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

ExperimentSummary aggregate(const std::vector<TrialSummary>& trials, Index n) {
  ExperimentSummary s;
  s.n = static_cast<int>(n);
  s.trials = static_cast<int>(trials.size());
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  s.decades.resize(kDecadeCount);
  for (int d = 0; d < kDecadeCount; ++d) {
    std::vector<double> vals;
    for (const auto& t : trials) {
      const auto& v = t.fes_to_accuracy.at(static_cast<std::size_t>(d));
      if (v) vals.push_back(static_cast<double>(*v) / nn);
    }
    DecadeStats& ds = s.decades[static_cast<std::size_t>(d)];
    ds.reached = static_cast<int>(vals.size());
    if (vals.empty()) continue;
    double sum = 0.0;
    for (double v : vals) sum += v;
    ds.mean = sum / static_cast<double>(vals.size());
    ds.min = *std::min_element(vals.begin(), vals.end());
    ds.max = *std::max_element(vals.begin(), vals.end());
    ds.median = median(vals);
  }
  std::vector<double> gaps, phase_ends;
  double gap_sum = 0.0;
  for (const auto& t : trials) {
    gaps.push_back(t.final_gap);
    gap_sum += t.final_gap;
    s.reached_target += t.reached_target;
    s.stop_target += t.stop_reason == StopReason::target;
    s.stop_budget += t.stop_reason == StopReason::budget;
    s.stop_iterations += t.stop_reason == StopReason::iterations;
    s.failed += !t.error.empty();
    if (t.three_phase) {
      ++s.three_phase;
      if (t.learning_phase_end) phase_ends.push_back(static_cast<double>(*t.learning_phase_end));
    }
  }
  if (!trials.empty()) {
    s.mean_final_gap = gap_sum / static_cast<double>(trials.size());
    s.median_final_gap = median(gaps);
  }
  if (!phase_ends.empty()) {
    double sum = 0.0;
    for (double v : phase_ends) sum += v;
    s.mean_learning_phase_end = sum / static_cast<double>(phase_ends.size());
  }
  return s;
}

std::vector<PlotRow> plot_data(const std::vector<TrialResult>& results) {
  std::vector<std::int64_t> grid;
  for (const auto& r : results)
    for (const auto& rec : r.trajectory.records) grid.push_back(rec.iteration);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<PlotRow> rows(grid.size());
  std::vector<std::size_t> cursor(results.size(), 0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    PlotRow& row = rows[g];
    row.iteration = grid[g];
    row.min_gap = std::numeric_limits<double>::infinity();
    row.max_gap = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    int count = 0;
    for (std::size_t t = 0; t < results.size(); ++t) {
      const auto& recs = results[t].trajectory.records;
      if (recs.empty()) continue;
      std::size_t& c = cursor[t];
      while (c + 1 < recs.size() && recs[c + 1].iteration <= grid[g]) ++c;
      const double gap = recs[c].gap;
      sum += gap;
      row.min_gap = std::min(row.min_gap, gap);
      row.max_gap = std::max(row.max_gap, gap);
      ++count;
    }
    row.mean_gap = count > 0 ? sum / count : std::numeric_limits<double>::quiet_NaN();
  }
  return rows;
}

}  // namespace vmrp
