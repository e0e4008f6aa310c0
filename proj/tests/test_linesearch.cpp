#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "vmrp/linesearch.hpp"
#include "vmrp/oracle.hpp"

using namespace vmrp;
using vmrp::testing::random_spd;

namespace {

FunctionOracle quadratic(const Matrix& A) {
  return FunctionOracle(A.rows(), [A](const Vector& x) { return 0.5 * x.dot(A * x); });
}

// Exact one-dimensional decrease of 1/2 x^T A x along u.
double exact_decrease(const Matrix& A, const Vector& x, const Vector& u) {
  const double g = (A * x).dot(u);
  return g * g / (2.0 * u.dot(A * u));
}

}  // namespace

TEST(ExactQuadratic, VertexOfParabola) {
  FunctionOracle f = quadratic(Matrix::Identity(3, 3));
  const Vector x = 2.0 * Vector::Unit(3, 0);
  const Vector u = Vector::Unit(3, 0);
  for (bool vertex : {false, true}) {
    const LineSearchResult r = exact_quadratic(f, x, f.value(x), u, vertex);
    EXPECT_NEAR(r.step, -2.0, 1e-14);
    EXPECT_NEAR(r.f_new, 0.0, 1e-14);
    EXPECT_EQ(r.fes_used, vertex ? 3 : 2);
    EXPECT_TRUE(r.accepted);
  }
}

TEST(ExactQuadratic, LinearSliceFallsBackToBestProbe) {
  FunctionOracle f(2, [](const Vector& x) { return 3.0 * x(0) - x(1); });
  const Vector x = Vector::Zero(2);
  const LineSearchResult r = exact_quadratic(f, x, 0.0, Vector::Unit(2, 0), false);
  EXPECT_DOUBLE_EQ(r.step, -1.0);
  EXPECT_DOUBLE_EQ(r.f_new, -3.0);
}

TEST(ExactQuadratic, ConcaveSliceFallsBackToBestProbe) {
  FunctionOracle f(1, [](const Vector& x) { return -x(0) * x(0) + 0.5 * x(0); });
  const LineSearchResult r = exact_quadratic(f, Vector::Zero(1), 0.0, Vector::Ones(1), false);
  EXPECT_DOUBLE_EQ(r.step, -1.0);
  EXPECT_DOUBLE_EQ(r.f_new, -1.5);
}

TEST(ExactQuadratic, StepIsAnalyticMinimizer) {
  SeededRng rng(1);
  for (int rep = 0; rep < 100; ++rep) {
    const Matrix A = random_spd(6, 0.1, 100.0, rng);
    FunctionOracle f = quadratic(A);
    const Vector x = rng.normal_vector(6);
    const Vector u = rng.normal_vector(6).normalized();
    const LineSearchResult r = exact_quadratic(f, x, f.value(x), u, false);
    const double h = -(A * x).dot(u) / u.dot(A * u);
    EXPECT_NEAR(r.step, h, 1e-10 * std::max(1.0, std::abs(h)));
    // mu = 1 sufficient decrease holds with equality.
    const double fx = 0.5 * x.dot(A * x);
    EXPECT_NEAR(fx - r.f_new, exact_decrease(A, x, u), 1e-9 * fx);
  }
}

TEST(ExactQuadratic, VertexValueMatchesModelOnQuadratics) {
  SeededRng rng(2);
  const Matrix A = random_spd(4, 0.5, 3.0, rng);
  FunctionOracle f = quadratic(A);
  const Vector x = rng.normal_vector(4);
  const Vector u = rng.normal_vector(4);
  const double fx = f.value(x);
  const LineSearchResult model = exact_quadratic(f, x, fx, u, false);
  const LineSearchResult vertex = exact_quadratic(f, x, fx, u, true);
  EXPECT_NEAR(model.f_new, vertex.f_new, 1e-12 * fx);
  EXPECT_NEAR(vertex.f_new, f.value(x + vertex.step * u), 0.0);
}

TEST(AdaptiveEs, ConstantFunctionNeverAccepts) {
  FunctionOracle f(2, [](const Vector&) { return 1.0; });
  SeededRng rng(3);
  AdaptiveStepState st;
  const double shrink = std::exp(-st.adapt_factor * st.target_p);
  for (int i = 0; i < 50; ++i) {
    const double before = st.sigma;
    const LineSearchResult r = adaptive_es(f, Vector::Zero(2), 1.0, Vector::Unit(2, 0), st, rng);
    EXPECT_FALSE(r.accepted);
    EXPECT_EQ(r.step, 0.0);
    EXPECT_EQ(r.f_new, 1.0);
    EXPECT_EQ(r.fes_used, 1);
    EXPECT_NEAR(st.sigma, before * shrink, 1e-15 * before);
  }
}

TEST(AdaptiveEs, SuccessGrowsSigma) {
  // Decreasing in both directions away from 0.
  FunctionOracle f(1, [](const Vector& x) { return -std::abs(x(0)); });
  SeededRng rng(4);
  AdaptiveStepState st;
  const LineSearchResult r = adaptive_es(f, Vector::Zero(1), 0.0, Vector::Ones(1), st, rng);
  EXPECT_TRUE(r.accepted);
  EXPECT_NEAR(std::abs(r.step), 1.0, 0.0);
  EXPECT_NEAR(st.sigma, std::exp(0.73 / 3.0), 1e-15);
}

// On a 1-D quadratic every success shrinks |x|, so sigma must shrink at the
// same log-rate and the success rate settles below target_p by exactly the
// log-drift of sigma per step over adapt_factor.
TEST(AdaptiveEs, StepTracksDistance) {
  FunctionOracle f(1, [](const Vector& x) { return 0.5 * x(0) * x(0); });
  SeededRng rng(5);
  AdaptiveStepState st;
  // Start off the sigma grid so no probe lands exactly on the minimizer.
  Vector x = Vector::Constant(1, 1.3);
  double fx = f.value(x);
  int successes = 0;
  const int N = 2000;
  for (int i = 0; i < N; ++i) {
    const LineSearchResult r = adaptive_es(f, x, fx, Vector::Ones(1), st, rng);
    if (r.accepted) {
      ++successes;
      x(0) += r.step;
    }
    EXPECT_LE(r.f_new, fx);
    fx = r.f_new;
    if (i >= 100) {
      const double ratio = st.sigma / std::abs(x(0));
      ASSERT_GT(ratio, 1e-3) << i;
      ASSERT_LT(ratio, 1e3) << i;
    }
  }
  const double rate = static_cast<double>(successes) / N;
  EXPECT_NEAR(rate, st.target_p + std::log(st.sigma) / (st.adapt_factor * N), 1e-12);
  EXPECT_GT(rate, 0.05);
  EXPECT_LT(rate, st.target_p);
}

TEST(Bisection, RelativeAccuracyAgainstExact) {
  SeededRng rng(6);
  for (int rep = 0; rep < 200; ++rep) {
    const Matrix A = random_spd(5, 0.01, 100.0, rng);
    FunctionOracle f = quadratic(A);
    const Vector x = rng.normal_vector(5) * std::exp(3.0 * rng.normal());
    const Vector u = rng.normal_vector(5) * std::exp(rng.normal());
    const double fx = f.value(x);
    const LineSearchResult r = bisection_relative(f, x, fx, u, 0.5, 60);
    EXPECT_TRUE(r.certified);
    EXPECT_LE(r.f_new, fx);
    EXPECT_GE(fx - r.f_new, 0.5 * exact_decrease(A, x, u) * (1 - 1e-12));
  }
}

// Relative accuracy mu implies decrease >= mu <grad, u>^2 / (2 ||u||_L^2).
TEST(Bisection, SufficientDecrease) {
  SeededRng rng(7);
  for (double mu : {0.1, 0.5, 0.9}) {
    for (int rep = 0; rep < 50; ++rep) {
      const Matrix A = random_spd(4, 0.1, 10.0, rng);
      FunctionOracle f = quadratic(A);
      const Vector x = rng.normal_vector(4);
      const Vector u = rng.normal_vector(4);
      const double fx = f.value(x);
      const LineSearchResult r = bisection_relative(f, x, fx, u, mu, 80);
      const double g = (A * x).dot(u);
      EXPECT_GE(fx - r.f_new, mu * g * g / (2.0 * u.dot(A * u)) * (1 - 1e-12));
    }
  }
}

TEST(Bisection, AtLineMinimumStaysPut) {
  const Matrix A = Matrix::Identity(2, 2);
  FunctionOracle f = quadratic(A);
  const Vector x = Vector::Unit(2, 0);
  const Vector u = Vector::Unit(2, 1);
  const LineSearchResult r = bisection_relative(f, x, f.value(x), u, 0.5, 60);
  EXPECT_NEAR(r.step, 0.0, 1e-6);
  EXPECT_NEAR(r.f_new, 0.5, 1e-12);
}

TEST(Bisection, MuOneUsesInternalTolerance) {
  SeededRng rng(8);
  const Matrix A = random_spd(3, 0.5, 5.0, rng);
  FunctionOracle f = quadratic(A);
  const Vector x = rng.normal_vector(3);
  const Vector u = rng.normal_vector(3);
  const double fx = f.value(x);
  const LineSearchResult r = bisection_relative(f, x, fx, u, 1.0, 200);
  EXPECT_TRUE(r.certified);
  EXPECT_GE(fx - r.f_new, (1.0 - 1e-3) * exact_decrease(A, x, u) * (1 - 1e-12));
}

TEST(Bisection, RejectsBadArguments) {
  FunctionOracle f = quadratic(Matrix::Identity(2, 2));
  EXPECT_THROW(bisection_relative(f, Vector::Ones(2), 1.0, Vector::Ones(2), 0.0, 10), std::invalid_argument);
  EXPECT_THROW(bisection_relative(f, Vector::Ones(2), 1.0, Vector::Ones(2), 0.5, 1), std::invalid_argument);
}

TEST(LineSearch, NeverUphillAndCountsFes) {
  SeededRng rng(9);
  FunctionOracle rosen(4, [](const Vector& x) {
    double s = 0.0;
    for (Index i = 0; i + 1 < x.size(); ++i)
      s += 100.0 * std::pow(x(i + 1) - x(i) * x(i), 2) + std::pow(x(i) - 1.0, 2);
    return s;
  });
  for (const LineSearchSpec& spec : {LineSearchSpec{ExactLineSearch{}}, LineSearchSpec{ExactLineSearch{false}},
                                     LineSearchSpec{AdaptiveEsLineSearch{}},
                                     LineSearchSpec{BisectionLineSearch{}}}) {
    LineSearch ls(spec);
    Vector x = Vector::Zero(4);
    double fx = rosen.value(x);
    for (int i = 0; i < 200; ++i) {
      const Vector u = rng.normal_vector(4).normalized() * 0.3;
      const std::int64_t before = rosen.evaluations();
      const LineSearchResult r = ls(rosen, x, fx, u, rng);
      EXPECT_EQ(rosen.evaluations() - before, r.fes_used);
      EXPECT_LE(r.f_new, fx);
      x += r.step * u;
      fx = r.f_new;
    }
  }
}
