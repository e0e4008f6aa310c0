#pragma once

#include <cstdint>
#include <variant>

#include "vmrp/oracle.hpp"
#include "vmrp/sampling.hpp"

namespace vmrp {

struct LineSearchResult {
  double step = 0.0;
  std::int64_t fes_used = 0;
  double f_new = 0.0;
  bool accepted = false;
  /// Bisection only: false when the budget ran out before the relative
  /// accuracy certificate was established.
  bool certified = true;
};

struct AdaptiveStepState {
  double sigma = 1.0;
  double target_p = 0.27;
  double adapt_factor = 1.0 / 3.0;
};

/// Parabola through f(x - u), f(x), f(x + u). f(x) is passed in (cached), so
/// this costs 2 evaluations, or 3 with evaluate_vertex. Without the vertex
/// evaluation f_new is the parabola's minimum, which is exact on quadratics
/// in exact arithmetic only: an error e in fx moves the model value by
/// (1 - h^2) e, so chaining model values over long steps drifts.
/// On a non-convex slice the better probe is taken (or h = 0 if neither
/// improves).
LineSearchResult exact_quadratic(Oracle& f, const Vector& x, double fx, const Vector& u,
                                 bool evaluate_vertex = false);

/// One probe at x + s*sigma*u with a random sign s. sigma grows by
/// exp(a(1-p)) on success and shrinks by exp(-a p) on failure.
LineSearchResult adaptive_es(Oracle& f, const Vector& x, double fx, const Vector& u,
                             AdaptiveStepState& state, SeededRng& rng);

/// Bracketing by step doubling followed by golden-section search, stopped once
/// convexity certifies f(x) - f_new >= mu (f(x) - min_t f(x + t u)).
/// mu is capped at 1 - 1e-3 internally.
LineSearchResult bisection_relative(Oracle& f, const Vector& x, double fx, const Vector& u,
                                    double mu, std::int64_t max_fes);

struct ExactLineSearch {
  /// Measure f at the vertex so the pursuit never carries a model value.
  bool evaluate_vertex = true;
};
struct AdaptiveEsLineSearch {
  AdaptiveStepState initial;
};
struct BisectionLineSearch {
  double mu = 0.5;
  std::int64_t max_fes = 60;
};
using LineSearchSpec = std::variant<ExactLineSearch, AdaptiveEsLineSearch, BisectionLineSearch>;

/// A line search oracle together with its per-run state (the ES step size).
class LineSearch {
 public:
  explicit LineSearch(LineSearchSpec spec);

  LineSearchResult operator()(Oracle& f, const Vector& x, double fx, const Vector& u,
                              SeededRng& rng);
  const LineSearchSpec& spec() const { return spec_; }
  const AdaptiveStepState& es_state() const { return es_state_; }
  /// Exact and bisection never move uphill; ES may reject.
  bool always_accepts() const { return !std::holds_alternative<AdaptiveEsLineSearch>(spec_); }

 private:
  LineSearchSpec spec_;
  AdaptiveStepState es_state_;
};

}  // namespace vmrp
