#include "vmrp/linesearch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vmrp {

namespace {

constexpr double kGolden = 0.3819660112501051;  // 2 - golden ratio
constexpr double kMaxRelativeAccuracy = 1.0 - 1e-3;

// Counts probes along the line x + t u.
class LineProbe {
 public:
  LineProbe(Oracle& f, const Vector& x, const Vector& u) : f_(f), x_(x), u_(u) {}
  double operator()(double t) {
    ++used_;
    return f_.value(x_ + t * u_);
  }
  std::int64_t used() const { return used_; }

 private:
  Oracle& f_;
  const Vector& x_;
  const Vector& u_;
  std::int64_t used_ = 0;
};

}  // namespace

LineSearchResult exact_quadratic(Oracle& f, const Vector& x, double fx, const Vector& u,
                                 bool evaluate_vertex) {
  if (u.squaredNorm() == 0.0) throw std::invalid_argument("exact_quadratic: zero direction");
  LineProbe phi(f, x, u);
  const double f_plus = phi(1.0);
  const double f_minus = phi(-1.0);

  LineSearchResult r;
  r.accepted = true;
  // Best of {0, +1, -1}.
  r.step = 0.0;
  r.f_new = fx;
  if (f_plus < r.f_new) {
    r.step = 1.0;
    r.f_new = f_plus;
  }
  if (f_minus < r.f_new) {
    r.step = -1.0;
    r.f_new = f_minus;
  }

  const double den = f_plus - 2.0 * fx + f_minus;
  if (den > 0.0 && std::isfinite(den)) {
    const double h = (f_minus - f_plus) / (2.0 * den);
    const double diff = f_plus - f_minus;
    const double model = fx - diff * diff / (8.0 * den);
    if (evaluate_vertex) {
      const double fv = phi(h);
      if (fv <= r.f_new) {
        r.step = h;
        r.f_new = fv;
      }
    } else {
      r.step = h;
      r.f_new = std::min(model, fx);
    }
  }
  r.fes_used = phi.used();
  return r;
}

LineSearchResult adaptive_es(Oracle& f, const Vector& x, double fx, const Vector& u,
                             AdaptiveStepState& state, SeededRng& rng) {
  if (!(state.sigma > 0.0)) throw std::invalid_argument("adaptive_es: sigma must be positive");
  const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
  const double t = sign * state.sigma;
  const double ft = f.value(x + t * u);

  LineSearchResult r;
  r.fes_used = 1;
  if (ft < fx) {
    r.accepted = true;
    r.step = t;
    r.f_new = ft;
    state.sigma *= std::exp(state.adapt_factor * (1.0 - state.target_p));
  } else {
    r.accepted = false;
    r.step = 0.0;
    r.f_new = fx;
    state.sigma *= std::exp(-state.adapt_factor * state.target_p);
  }
  // Keep sigma representable.
  state.sigma = std::clamp(state.sigma, 1e-300, 1e300);
  return r;
}

LineSearchResult bisection_relative(Oracle& f, const Vector& x, double fx, const Vector& u,
                                    double mu, std::int64_t max_fes) {
  if (!(mu > 0.0 && mu <= 1.0)) throw std::invalid_argument("bisection_relative: mu must lie in (0, 1]");
  if (max_fes < 2) throw std::invalid_argument("bisection_relative: max_fes must be at least 2");
  const double mu_eff = std::min(mu, kMaxRelativeAccuracy);
  LineProbe phi(f, x, u);

  LineSearchResult r;
  r.accepted = true;
  r.certified = false;

  // Bracket a < b < c with phi(b) <= phi(a), phi(c).
  double a, b, c, fa, fb, fc;
  const double f1 = phi(1.0);
  if (f1 < fx) {
    a = 0.0, fa = fx, b = 1.0, fb = f1;
    c = 2.0, fc = phi(c);
    while (fc < fb && phi.used() < max_fes) {
      a = b, fa = fb, b = c, fb = fc;
      c = 2.0 * c;
      fc = phi(c);
    }
  } else {
    const double fm1 = phi(-1.0);
    if (fm1 < fx) {
      c = 0.0, fc = fx, b = -1.0, fb = fm1;
      a = -2.0, fa = phi(a);
      while (fa < fb && phi.used() < max_fes) {
        c = b, fc = fb, b = a, fb = fa;
        a = 2.0 * a;
        fa = phi(a);
      }
    } else {
      a = -1.0, fa = fm1, b = 0.0, fb = fx, c = 1.0, fc = f1;
    }
  }

  auto finish = [&](bool certified) {
    r.step = b;
    r.f_new = fb;
    r.certified = certified;
    r.fes_used = phi.used();
    return r;
  };

  // Doubling ran out of budget without closing the bracket.
  if (!(fb <= fa && fb <= fc)) {
    if (fa < fb) b = a, fb = fa;
    if (fc < fb) b = c, fb = fc;
    return finish(false);
  }

  for (;;) {
    // Convexity: the secant through (b, c) extended to a and the secant
    // through (a, b) extended to c both underestimate phi on [a, c].
    const double slope_ab = (fb - fa) / (b - a);
    const double slope_bc = (fc - fb) / (c - b);
    const double lower = std::min(fb - slope_bc * (b - a), fb + slope_ab * (c - b));
    const double gap_start = fx - lower;
    if (!(gap_start > 1e-14 * std::abs(fx)) || fb - lower <= (1.0 - mu_eff) * gap_start) {
      return finish(true);
    }
    if (phi.used() >= max_fes) return finish(false);

    // Golden-section probe in the larger subinterval.
    if (c - b > b - a) {
      const double t = b + kGolden * (c - b);
      const double ft = phi(t);
      if (ft <= fb) {
        a = b, fa = fb, b = t, fb = ft;
      } else {
        c = t, fc = ft;
      }
    } else {
      const double t = b - kGolden * (b - a);
      const double ft = phi(t);
      if (ft <= fb) {
        c = b, fc = fb, b = t, fb = ft;
      } else {
        a = t, fa = ft;
      }
    }
  }
}

LineSearch::LineSearch(LineSearchSpec spec) : spec_(std::move(spec)) {
  if (const auto* es = std::get_if<AdaptiveEsLineSearch>(&spec_)) {
    if (!(es->initial.sigma > 0.0)) throw std::invalid_argument("LineSearch: sigma must be positive");
    es_state_ = es->initial;
  }
}

LineSearchResult LineSearch::operator()(Oracle& f, const Vector& x, double fx, const Vector& u,
                                        SeededRng& rng) {
  if (const auto* e = std::get_if<ExactLineSearch>(&spec_)) {
    return exact_quadratic(f, x, fx, u, e->evaluate_vertex);
  }
  if (std::holds_alternative<AdaptiveEsLineSearch>(spec_)) {
    return adaptive_es(f, x, fx, u, es_state_, rng);
  }
  const auto& b = std::get<BisectionLineSearch>(spec_);
  return bisection_relative(f, x, fx, u, b.mu, b.max_fes);
}

}  // namespace vmrp
