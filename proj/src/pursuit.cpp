#include "vmrp/pursuit.hpp"

#include <cmath>
#include <optional>

#include <Eigen/Eigenvalues>

namespace vmrp {

StopCriteria StopCriteria::for_dimension(Index n) {
  StopCriteria s;
  s.max_fes = 200 * static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n);
  return s;
}

void StopCriteria::validate() const {
  if (max_iterations < 0 && max_fes < 0 && target_gap < 0.0) {
    throw std::invalid_argument("stop criteria: at least one of max_iterations, max_fes, target_gap must be set");
  }
}

std::string stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::target: return "target";
    case StopReason::budget: return "budget";
    case StopReason::iterations: return "iterations";
  }
  return "?";
}

StopReason parse_stop_reason(const std::string& s) {
  if (s == "target") return StopReason::target;
  if (s == "budget") return StopReason::budget;
  if (s == "iterations") return StopReason::iterations;
  throw std::invalid_argument("unknown stop reason '" + s + "'");
}

std::string update_scheme_name(UpdateScheme s) {
  switch (s) {
    case UpdateScheme::plain: return "plain";
    case UpdateScheme::corr: return "corr";
    case UpdateScheme::store: return "store";
  }
  return "?";
}

UpdateScheme parse_update_scheme(const std::string& s) {
  if (s == "plain") return UpdateScheme::plain;
  if (s == "corr") return UpdateScheme::corr;
  if (s == "store") return UpdateScheme::store;
  throw std::invalid_argument("unknown update scheme '" + s + "'");
}

std::string update_at_name(UpdateAt a) {
  return a == UpdateAt::interlaced ? "interlaced" : "fixed-point";
}

UpdateAt parse_update_at(const std::string& s) {
  if (s == "interlaced") return UpdateAt::interlaced;
  if (s == "fixed-point") return UpdateAt::fixed_point;
  throw std::invalid_argument("unknown update_at mode '" + s + "'");
}

void HessianUpdateConfig::validate() const {
  if (!(eps > 0.0)) throw std::invalid_argument("update: eps must be positive");
  if (m < 0) throw std::invalid_argument("update: m must be non-negative");
  if (capacity < 0) throw std::invalid_argument("update: capacity must be non-negative");
  if (reuse_every < 0) throw std::invalid_argument("update: reuse_every must be non-negative");
}

double kappa_BinvH(const Matrix& B, const Matrix& H) {
  const PDMatrix b{SymmetricMatrix(B)};
  const Matrix r = pd_inv_sqrt(b);
  const auto e = eig_extremes(SymmetricMatrix(r * H * r));
  if (!(e.min > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return e.max / e.min;
}

namespace {

std::vector<double> inverse_spectrum(const Matrix& B) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(B, Eigen::EigenvaluesOnly);
  const Vector ev = es.eigenvalues();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(ev.size()));
  for (Index i = ev.size() - 1; i >= 0; --i) out.push_back(1.0 / ev(i));
  return out;
}

// Shared loop: stop checks, recording, and failure wrapping. step(k) advances
// x and fx by one iteration; metric() returns the current B.
template <class Step, class Metric>
Trajectory drive(ObjectiveInstance& f, const Vector& x0, const StopCriteria& stop,
                 const RecordOptions& rec, Vector& x, double& fx, Trajectory& t, Step step,
                 Metric metric) {
  stop.validate();
  if (x0.size() != f.dim()) throw std::invalid_argument("pursuit: x0 dimension mismatch");
  if (!x0.allFinite()) throw std::invalid_argument("pursuit: x0 must be finite");
  const std::int64_t fes_start = f.evaluations();
  x = x0;
  fx = f.value(x);
  std::int64_t k = 0;

  auto push = [&](bool force_diag) {
    TrajectoryRecord r;
    r.iteration = k;
    r.fes = f.evaluations() - fes_start;
    r.fval = fx;
    r.gap = fx - f.f_star();
    const bool diag = rec.kappa_every > 0 && (force_diag || k % rec.kappa_every == 0);
    if (diag || rec.spectrum) {
      const Matrix B = metric();
      if (diag) r.kappa = kappa_BinvH(B, f.hessian(x));
      if (rec.spectrum) r.spectrum = inverse_spectrum(B);
    }
    t.records.push_back(std::move(r));
  };
  auto track = [&]() {
    const double gap = fx - f.f_star();
    for (int d = 0; d < kDecadeCount; ++d) {
      auto& slot = t.decade_fes[static_cast<std::size_t>(d)];
      if (slot < 0 && gap <= decade_threshold(d)) slot = f.evaluations() - fes_start;
    }
  };
  auto finalize = [&]() {
    if (t.records.empty() || t.records.back().iteration != k) push(true);
    t.x = x;
    t.iterations = k;
    t.fes = f.evaluations() - fes_start;
  };

  try {
    push(true);
    track();
    for (;;) {
      const std::int64_t used = f.evaluations() - fes_start;
      if (stop.target_gap >= 0.0 && fx - f.f_star() <= stop.target_gap) {
        t.stop_reason = StopReason::target;
        break;
      }
      if (stop.max_fes >= 0 && used >= stop.max_fes) {
        t.stop_reason = StopReason::budget;
        break;
      }
      if (stop.max_iterations >= 0 && k >= stop.max_iterations) {
        t.stop_reason = StopReason::iterations;
        break;
      }
      ++k;
      step(k);
      if (!std::isfinite(fx)) throw std::runtime_error("pursuit: non-finite function value");
      track();
      if (rec.every > 0 && k % rec.every == 0) push(false);
    }
  } catch (const std::exception& e) {
    finalize();
    throw PursuitError(e.what(), t);
  }
  finalize();
  return t;
}

}  // namespace

Trajectory run_frp(ObjectiveInstance& f, const Vector& x0, const PDMatrix& Sigma, LineSearch& ls,
                   const StopCriteria& stop, SeededRng& rng, const RecordOptions& rec) {
  if (Sigma.dim() != f.dim()) throw std::invalid_argument("run_frp: Sigma dimension mismatch");
  const Matrix& c = Sigma.factor();
  Trajectory t;
  Vector x;
  double fx = 0.0;
  auto step = [&](std::int64_t) {
    const Vector u = sample_normalized(c, rng).u;
    const LineSearchResult r = ls(f, x, fx, u, rng);
    if (r.accepted && r.step != 0.0) {
      x += r.step * u;
      ++t.accepted_steps;
    }
    fx = r.f_new;
  };
  auto metric = [&]() -> Matrix { return Sigma.inverse(); };
  return drive(f, x0, stop, rec, x, fx, t, step, metric);
}

Trajectory run_vrp(ObjectiveInstance& f, const Vector& x0, const PDMatrix& B0, LineSearch& ls,
                   const HessianUpdateConfig& update, const StopCriteria& stop, SeededRng& rng,
                   const RecordOptions& rec) {
  update.validate();
  const Index n = f.dim();
  if (B0.dim() != n) throw std::invalid_argument("run_vrp: B0 dimension mismatch");
  const std::int64_t nn = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n);
  const std::int64_t capacity = update.capacity > 0 ? update.capacity : 2 * nn;
  const std::int64_t reuse_every = update.reuse_every > 0 ? update.reuse_every : n;
  const std::int64_t reuse_start = update.reuse_start >= 0 ? update.reuse_start : nn;

  HessianEstimate est(B0);
  CurvatureStore store(static_cast<std::size_t>(capacity));
  Trajectory t;
  Vector x;
  double fx = 0.0;
  std::optional<double> f0;

  auto step = [&](std::int64_t k) {
    if (!f0) f0 = fx;  // first iteration: fx is f(x0)
    const bool at_start = update.update_at == UpdateAt::fixed_point;
    const Vector& xu = at_start ? x0 : x;
    const double fu = at_start ? *f0 : fx;

    switch (update.scheme) {
      case UpdateScheme::plain: {
        const Vector u = sample_sphere(n, rng);
        const double q = curvature_fd(f, xu, fu, u, update.eps);
        const double d = q - u.dot(est.B() * u);
        if (rank1_pd_criterion(u.dot(est.B_inv() * u), d)) {
          est.rank1(u, d);
          if (!est.is_pd()) {
            est.rank1(u, -d);
            ++t.rejected_updates;
          }
        } else {
          ++t.rejected_updates;
        }
        break;
      }
      case UpdateScheme::corr: {
        const UpdateOutcome o = update_corr(f, xu, fu, est, update.eps, rng);
        t.rejected_updates += o.rejected;
        t.corrected_updates += o.corrected;
        break;
      }
      case UpdateScheme::store: {
        const bool reuse_now = update.reuse && k >= reuse_start && k % reuse_every == 0;
        const UpdateOutcome o =
            update_store(f, xu, fu, est, update.eps, reuse_now, update.m, store, rng, k);
        t.rejected_updates += o.rejected;
        t.corrected_updates += o.corrected;
        t.reuse_applied += o.reuse_applied;
        break;
      }
    }

    const Vector u = sample_from_precision(est.factor(), rng).u;
    const LineSearchResult r = ls(f, x, fx, u, rng);
    if (r.accepted && r.step != 0.0) {
      x += r.step * u;
      ++t.accepted_steps;
    }
    fx = r.f_new;
  };
  auto metric = [&]() -> Matrix { return est.B(); };
  return drive(f, x0, stop, rec, x, fx, t, step, metric);
}

}  // namespace vmrp
