#include "vmrp/app/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "vmrp/hessian.hpp"
#include "vmrp/objective.hpp"
#include "vmrp/sampling.hpp"
#include "vmrp/theory.hpp"

namespace vmrp::app {

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

namespace {

Matrix random_spd(Index n, double lo, double hi, SeededRng& rng) {
  const Matrix q = haar_rotation(n, rng);
  Vector ev(n);
  for (Index i = 0; i < n; ++i) ev(i) = lo + (hi - lo) * rng.uniform();
  Matrix a = q * ev.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

Matrix random_symmetric(Index n, SeededRng& rng) {
  const Matrix g = rng.normal_matrix(n, n);
  return 0.5 * (g + g.transpose());
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Check within(const std::string& name, double measured, double tolerance, const std::string& detail = {}) {
  return {name, measured, tolerance, measured <= tolerance, detail};
}

// |mean - exact| against 3 se for a scalar. The 1e-12 relative floor covers
// moments with zero variance, where se is 0 and only rounding remains.
Check scalar_3se(const std::string& name, double mean, double se, double exact) {
  const double diff = std::abs(mean - exact);
  return within(name, diff, std::max(3.0 * se, 1e-12 * std::abs(exact)), "mean " + fmt(mean) + " exact " + fmt(exact) + " se " + fmt(se));
}

// Frobenius distance against 3 sqrt(sum se^2) for a matrix or vector.
Check array_3se(const std::string& name, const Matrix& mean, const Matrix& se, const Matrix& exact) {
  const double diff = (mean - exact).norm();
  const double tol = 3.0 * se.norm();
  return within(name, diff, tol, "relative error " + fmt(diff / exact.norm()));
}

}  // namespace

std::vector<Check> check_moments(const std::vector<int>& dims, std::int64_t samples, std::uint64_t seed) {
  std::vector<Check> out;
  SeededRng rng(seed);
  for (int n : dims) {
    const PDMatrix sigma(random_spd(n, 0.5, 2.0, rng));
    const SymmetricMatrix A(random_spd(n, 0.5, 2.0, rng));
    const Vector x = rng.normal_vector(n);
    for (auto mode : {MomentSampling::normalized, MomentSampling::gaussian}) {
      const std::string tag = std::string(mode == MomentSampling::normalized ? "normalized" : "gaussian") +
                              " n=" + std::to_string(n) + " ";
      const MomentEstimate est = estimate_moments(sigma, A, x, samples, rng, mode);
      const MomentValues ex = expected_moments(sigma, A, x, mode);
      out.push_back(array_3se(tag + "E[vv^T]", est.mean.outer, est.standard_error.outer, ex.outer));
      out.push_back(scalar_3se(tag + "E[v^T A v]", est.mean.quad, est.standard_error.quad, ex.quad));
      out.push_back(scalar_3se(tag + "E[(v^T A v)^2]", est.mean.quad_sq, est.standard_error.quad_sq, ex.quad_sq));
      out.push_back(array_3se(tag + "E[<x,v>v]", est.mean.projection, est.standard_error.projection,
                              ex.projection));
      out.push_back(scalar_3se(tag + "E[||<x,v>v||_A^2]", est.mean.projection_norm,
                               est.standard_error.projection_norm, ex.projection_norm));
    }
  }
  return out;
}

std::vector<Check> check_rhe_exact(int n, std::int64_t N, std::int64_t runs,
                                   const std::vector<std::int64_t>& checkpoints, std::uint64_t seed) {
  std::vector<Check> out;
  SeededRng rng(seed);
  const double d = static_cast<double>(n);
  const double rate = 1.0 - 2.0 / (d * (d + 2.0));

  // X0 traceless and X0 = c I, both with ||X0||_F = 1.
  Matrix traceless = random_symmetric(n, rng);
  traceless -= (traceless.trace() / d) * Matrix::Identity(n, n);
  traceless /= traceless.norm();
  const Matrix scaled = Matrix::Identity(n, n) / std::sqrt(d);
  const std::vector<std::pair<std::string, Matrix>> starts = {{"traceless", traceless},
                                                              {"trace-heavy", scaled}};

  for (const auto& [label, X0] : starts) {
    const RheState s0{X0.squaredNorm(), X0.trace() * X0.trace()};
    const std::string tag = label + " n=" + std::to_string(n) + " ";

    double worst_rel = 0.0, worst_bound = -std::numeric_limits<double>::infinity();
    for (std::int64_t k = 0; k <= N; ++k) {
      const RheState cf = rhe_exact_expectation(s0, n, k);
      const RheState it = rhe_recurrence(s0, n, k);
      auto rel = [](double a, double b) {
        return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
      };
      worst_rel = std::max({worst_rel, rel(cf.frob_sq, it.frob_sq), rel(cf.trace_sq, it.trace_sq)});
      worst_bound = std::max(worst_bound, cf.frob_sq - std::pow(rate, static_cast<double>(k)) * s0.frob_sq);
    }
    out.push_back(within(tag + "closed form vs recurrence (max rel)", worst_rel, 1e-10));
    out.push_back(within(tag + "E||X_N||^2 <= (1-2/(n(n+2)))^N ||X_0||^2", worst_bound, 1e-12,
                         "max excess over bound, ||X_0||_F = 1"));

    // Simulated plain updates with exact curvature: H = 10 I, B0 = H + X0.
    const Matrix H = 10.0 * Matrix::Identity(n, n);
    std::vector<double> fm(checkpoints.size()), fm2(checkpoints.size());
    std::vector<double> tm(checkpoints.size()), tm2(checkpoints.size());
    for (std::int64_t r = 0; r < runs; ++r) {
      HessianEstimate est(PDMatrix(Matrix(H + X0)));
      std::size_t c = 0;
      for (std::int64_t k = 1; k <= N && c < checkpoints.size(); ++k) {
        const Vector u = sample_sphere(n, rng);
        update_plain(est, u, u.dot(H * u));
        if (k == checkpoints[c]) {
          const Matrix X = est.B() - H;
          const double f = X.squaredNorm();
          const double t = X.trace() * X.trace();
          fm[c] += f, fm2[c] += f * f, tm[c] += t, tm2[c] += t * t;
          ++c;
        }
      }
    }
    const double R = static_cast<double>(runs);
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      const RheState cf = rhe_exact_expectation(s0, n, checkpoints[c]);
      const double fmean = fm[c] / R, tmean = tm[c] / R;
      const double fse = std::sqrt(std::max(0.0, fm2[c] / R - fmean * fmean) / (R - 1.0));
      const double tse = std::sqrt(std::max(0.0, tm2[c] / R - tmean * tmean) / (R - 1.0));
      const std::string at = "N=" + std::to_string(checkpoints[c]);
      out.push_back(scalar_3se(tag + "MC E||X||^2 " + at, fmean, fse, cf.frob_sq));
      out.push_back(scalar_3se(tag + "MC E Tr[X]^2 " + at, tmean, tse, cf.trace_sq));
    }
  }
  return out;
}

std::vector<Check> check_single_step(int n, std::int64_t samples, std::uint64_t seed) {
  SeededRng rng(seed);
  const Matrix B = random_spd(n, 1.0, 3.0, rng);
  const Matrix H = random_spd(n, 1.0, 3.0, rng);
  const Matrix X = B - H;
  const double g = X.squaredNorm();
  const double tr = X.trace();
  const double d = static_cast<double>(n);
  const double exact = g - (2.0 * g + tr * tr) / (d * (d + 2.0));

  const HessianEstimate base{PDMatrix(B)};
  double mean = 0.0, m2 = 0.0;
  for (std::int64_t s = 1; s <= samples; ++s) {
    HessianEstimate est = base;
    const Vector u = sample_sphere(n, rng);
    update_plain(est, u, u.dot(H * u));
    const double v = (est.B() - H).squaredNorm();
    const double delta = v - mean;
    mean += delta / static_cast<double>(s);
    m2 += delta * (v - mean);
  }
  const double se = std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
  return {scalar_3se("n=" + std::to_string(n) + " E g(B+)", mean, se, exact)};
}

std::vector<Check> check_diag(int n_min, int n_max) {
  double worst = 0.0;
  int worst_n = n_min;
  for (int n = n_min; n <= n_max; ++n) {
    const RheSpectralConstants c = rhe_constants(n);
    const double dev = (c.reconstructed() - c.recurrence()).cwiseAbs().maxCoeff();
    if (dev > worst) worst = dev, worst_n = n;
  }
  return {within("factorization n=" + std::to_string(n_min) + ".." + std::to_string(n_max) + " (max abs)",
                 worst, 1e-12, "worst at n=" + std::to_string(worst_n))};
}

std::vector<Check> check_pd(int n, double ell, std::int64_t steps, std::uint64_t seed) {
  SeededRng rng(seed);
  ObjectiveInstance f = make_f3(n, ell);
  const Vector x = Vector::Ones(n);
  const double fx = f.value(x);
  HessianEstimate est(PDMatrix(Matrix((ell / 2.0) * Matrix::Identity(n, n))));
  std::int64_t not_pd = 0, rejected = 0, corrected = 0;
  double worst_residual = 0.0;
  for (std::int64_t k = 0; k < steps; ++k) {
    const UpdateOutcome o = update_corr(f, x, fx, est, 1.0, rng);
    rejected += o.rejected;
    corrected += o.corrected;
    if (!pd_check(est.B())) ++not_pd;
    worst_residual = std::max(worst_residual, est.inverse_residual());
  }
  const std::string tag = "f3 n=" + std::to_string(n) + " ell=" + fmt(ell) + " ";
  std::vector<Check> out;
  out.push_back(within(tag + "iterates failing pd_check", static_cast<double>(not_pd), 0.0,
                       std::to_string(corrected) + " corrections"));
  out.push_back(within(tag + "rejected updates", static_cast<double>(rejected), 0.0));
  out.push_back(within(tag + "max ||B B^-1 - I||_F", worst_residual, 1e-8));
  return out;
}

std::vector<Check> check_propagation(int instances, std::uint64_t seed) {
  SeededRng rng(seed);
  const int n = 5;
  const double a = 1.0, b = 4.0;
  int violations = 0;
  double worst_ratio = 0.0;
  int built = 0;
  while (built < instances) {
    const Matrix H = random_spd(n, 1.5, 3.5, rng);
    const Matrix X = random_spd(n, 1.5, 3.5, rng);
    const double c = 0.9 * rng.uniform();
    Matrix E = random_symmetric(n, rng);
    E *= rng.uniform() * (a * a * c / b) / E.norm();
    const Matrix B = X + E;
    // Premises: spectra of B, H, X inside [a, b], ||B - X||_F <= a^2 c / b.
    bool ok = (B - X).norm() <= a * a * c / b;
    for (const Matrix* Y : {&B, &H, &X}) {
      const auto e = eig_extremes(SymmetricMatrix(*Y));
      ok = ok && e.min >= a && e.max <= b;
    }
    if (!ok) continue;
    ++built;
    const PDMatrix h{SymmetricMatrix(H)};
    const auto ex = generalized_eig_extremes(PDMatrix(X), h);
    const double dd = std::max(1.0, ex.max / ex.min);
    const auto eb = generalized_eig_extremes(PDMatrix(B), h);
    const double kappa = eb.max / eb.min;
    const double bound = kappa_propagation(a, b, c, dd);
    worst_ratio = std::max(worst_ratio, kappa / bound);
    if (kappa > bound) ++violations;
  }
  return {within(std::to_string(instances) + " instances: violations", static_cast<double>(violations), 0.0,
                 "max kappa/bound " + fmt(worst_ratio))};
}

std::vector<Check> check_store_concentration(int n, int h, int pairs, double ratio, double required_fraction,
                                             std::uint64_t seed) {
  SeededRng rng(seed);
  const double d = static_cast<double>(n);
  int good = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int p = 0; p < pairs; ++p) {
    const Matrix X = random_spd(n, 1.0, 3.0, rng) - random_spd(n, 1.0, 3.0, rng);
    const double exact = (X.trace() * X.trace() + 2.0 * X.squaredNorm()) / (d * (d + 2.0));
    double sum = 0.0;
    for (int i = 0; i < h; ++i) {
      const Vector u = sample_sphere(n, rng);
      const double q = u.dot(X * u);
      sum += q * q;
    }
    const double emp = sum / h;
    worst = std::min(worst, emp / exact);
    if (emp >= ratio * exact) ++good;
  }
  const double fraction = static_cast<double>(good) / pairs;
  return {{"n=" + std::to_string(n) + " h=" + std::to_string(h) + " fraction with E_U >= " + fmt(ratio) +
               " x closed form",
           fraction, required_fraction, fraction >= required_fraction,
           "passes when measured >= tolerance; min ratio " + fmt(worst)}};
}

VerifyReport run_suite(const std::string& suite, std::uint64_t seed, std::int64_t samples) {
  static const std::vector<std::string> known = {"moments", "rhe-exact", "diag", "pd", "propagation", "all"};
  if (std::find(known.begin(), known.end(), suite) == known.end()) {
    throw std::invalid_argument("unknown verify suite '" + suite + "'");
  }
  VerifyReport r;
  r.suite = suite;
  r.seed = seed;
  auto add = [&](std::vector<Check> cs) {
    for (auto& c : cs) r.checks.push_back(std::move(c));
  };
  const bool all = suite == "all";
  if (all || suite == "moments") add(check_moments({3, 5, 8}, samples > 0 ? samples : 1000000, seed));
  if (all || suite == "rhe-exact") {
    add(check_rhe_exact(8, 300, 5000, {50, 100, 200, 300}, seed));
    add(check_single_step(5, samples > 0 ? samples : 100000, seed + 1));
    add(check_store_concentration(6, 180, 200, 0.5, 0.95, seed + 2));
  }
  if (all || suite == "diag") add(check_diag(2, 100));
  if (all || suite == "pd") add(check_pd(10, 1e4, 10000, seed));
  if (all || suite == "propagation") add(check_propagation(200, seed));
  return r;
}

std::string report_to_json(const VerifyReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = "vmrp.verify/1";
  j["suite"] = r.suite;
  j["seed"] = r.seed;
  j["passed"] = r.passed();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["measured"] = c.measured;
    e["tolerance"] = c.tolerance;
    e["passed"] = c.passed;
    e["detail"] = c.detail;
    j["checks"].push_back(e);
  }
  return j.dump(2);
}

}  // namespace vmrp::app
