#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "vmrp/hessian.hpp"
#include "vmrp/objective.hpp"
#include "vmrp/oracle.hpp"

using namespace vmrp;
using vmrp::testing::mean_se;
using vmrp::testing::random_spd;

namespace {

FunctionOracle quadratic(const Matrix& A) {
  return FunctionOracle(A.rows(), [A](const Vector& x) { return 0.5 * x.dot(A * x); });
}

double g_err(const Matrix& B, const Matrix& H) { return (B - H).squaredNorm(); }

}  // namespace

TEST(CurvatureFd, LinearIsZero) {
  FunctionOracle f(3, [](const Vector& x) { return 2.0 * x(0) - x(2) + 4.0; });
  const Vector x = Vector::Ones(3);
  EXPECT_NEAR(curvature_fd(f, x, f.value(x), Vector::Ones(3).normalized(), 0.5), 0.0, 1e-12);
  EXPECT_EQ(f.evaluations(), 3);
}

TEST(CurvatureFd, ExactOnQuadraticsForAnyEps) {
  SeededRng rng(1);
  const Matrix A = random_spd(5, 0.5, 50.0, rng);
  FunctionOracle f = quadratic(A);
  const Vector u = rng.normal_vector(5).normalized();
  const double q = u.dot(A * u);
  for (double eps : {1e-6, 1.0, 10.0}) {
    EXPECT_NEAR(curvature_fd(f, Vector::Zero(5), 0.0, u, eps), q, 1e-9 * q) << eps;
  }
  const Vector x = rng.normal_vector(5);
  for (double eps : {1.0, 10.0}) EXPECT_NEAR(curvature_fd(f, x, f.value(x), u, eps), q, 1e-9 * q);
}

TEST(CurvatureFd, RosenbrockAtOrigin) {
  ObjectiveInstance f = make_f2(5);
  const Vector x = Vector::Zero(5);
  EXPECT_NEAR(curvature_fd(f, x, f.value(x), Vector::Unit(5, 0), 1e-4), 2.0, 1e-3);
}

TEST(CurvatureFd, RejectsNonFinite) {
  FunctionOracle f(1, [](const Vector& x) { return x(0) > 0.5 ? INFINITY : 0.0; });
  EXPECT_THROW(curvature_fd(f, Vector::Zero(1), 0.0, Vector::Ones(1), 1.0), std::runtime_error);
}

TEST(UpdatePlain, ZeroCoefficientLeavesB) {
  SeededRng rng(2);
  const Matrix B0 = random_spd(4, 1.0, 3.0, rng);
  HessianEstimate est{PDMatrix(B0)};
  const Vector u = sample_sphere(4, rng);
  update_plain(est, u, u.dot(B0 * u));
  EXPECT_LE((est.B() - B0).norm(), 1e-14);
}

TEST(UpdatePlain, CoordinateUpdate) {
  HessianEstimate est(PDMatrix::identity(2));
  update_plain(est, Vector::Unit(2, 0), 2.0);
  Matrix expected(2, 2);
  expected << 2, 0, 0, 1;
  EXPECT_LE((est.B() - expected).norm(), 1e-15);
  EXPECT_LE((est.B_inv() - expected.inverse()).norm(), 1e-15);
}

TEST(UpdatePlain, RequiresUnitDirection) {
  HessianEstimate est(PDMatrix::identity(2));
  EXPECT_THROW(update_plain(est, Vector::Ones(2), 1.0), std::invalid_argument);
}

// g(B+) = g(B) - (u^T (B - H) u)^2, and B+ interpolates the curvature along u.
TEST(UpdatePlain, FrobeniusIdentityAndInterpolation) {
  SeededRng rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const Matrix H = random_spd(5, 0.5, 5.0, rng);
    const Matrix B0 = random_spd(5, 0.5, 5.0, rng);
    HessianEstimate est{PDMatrix(B0)};
    const Vector u = sample_sphere(5, rng);
    const double q = u.dot(H * u);
    const double r = u.dot((B0 - H) * u);
    update_plain(est, u, q);
    EXPECT_NEAR(g_err(est.B(), H), g_err(B0, H) - r * r, 1e-10 * g_err(B0, H));
    EXPECT_LE(g_err(est.B(), H), g_err(B0, H) * (1 + 1e-12));
    EXPECT_NEAR(u.dot(est.B() * u), q, 1e-12 * q);
  }
}

// E g(B+) = g(B) - (2 g(B) + Tr[B - H]^2) / (n(n+2)) at fixed (B, H).
TEST(UpdatePlain, SingleStepExpectation) {
  SeededRng rng(4);
  const int n = 5;
  const Matrix H = random_spd(n, 1.0, 3.0, rng);
  const Matrix B = random_spd(n, 1.0, 3.0, rng);
  std::vector<double> vals;
  for (int i = 0; i < 100000; ++i) {
    const Vector u = sample_sphere(n, rng);
    const double r = u.dot((B - H) * u);
    vals.push_back(g_err(B, H) - r * r);
  }
  const auto ms = mean_se(vals);
  const double tr = (B - H).trace();
  const double exact = g_err(B, H) - (2.0 * g_err(B, H) + tr * tr) / (n * (n + 2.0));
  EXPECT_NEAR(ms.mean, exact, 3.0 * ms.se);
}

TEST(UpdateCorr, NoCorrectionAtTrueHessian) {
  SeededRng rng(5);
  const Matrix H = random_spd(6, 1.0, 100.0, rng);
  FunctionOracle f = quadratic(H);
  HessianEstimate est{PDMatrix(H)};
  for (int i = 0; i < 20; ++i) {
    const UpdateOutcome o = update_corr(f, Vector::Zero(6), 0.0, est, 1.0, rng);
    EXPECT_FALSE(o.corrected);
    EXPECT_FALSE(o.rejected);
    EXPECT_EQ(o.fes_used, 2);
  }
  EXPECT_LE((est.B() - H).norm(), 1e-8 * H.norm());
}

TEST(UpdateCorr, StaysPositiveDefiniteOnF3) {
  const int n = 10;
  const double ell = 1e4;
  ObjectiveInstance f = make_f3(n, ell);
  SeededRng rng(6);
  HessianEstimate est(PDMatrix(Matrix((ell / 2) * Matrix::Identity(n, n))));
  const Vector x = Vector::Ones(n);
  const double fx = f.value(x);
  int corrections = 0;
  for (int k = 0; k < 3000; ++k) {
    const UpdateOutcome o = update_corr(f, x, fx, est, 1.0, rng);
    corrections += o.corrected;
    ASSERT_FALSE(o.rejected);
    ASSERT_TRUE(pd_check(est.B()));
    ASSERT_LT(est.inverse_residual(), 1e-8);
  }
  EXPECT_GT(corrections, 0);
}

// A - x x^T indefinite; adding |lambda_min| z z^T along its bottom
// eigenvector gives a PSD matrix.
TEST(Correction, BottomEigenvectorRepair) {
  SeededRng rng(7);
  int tested = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const Matrix A = random_spd(5, 0.1, 2.0, rng);
    const Vector x = rng.normal_vector(5) * 2.0;
    const Matrix T = A - x * x.transpose();
    const SmallestEig se = smallest_eigvec(SymmetricMatrix(T));
    if (se.lambda >= 0.0) continue;
    ++tested;
    const Matrix R = T + std::abs(se.lambda) * se.v * se.v.transpose();
    EXPECT_GE(vmrp::testing::eigenvalues(R).minCoeff(), -1e-10);
  }
  EXPECT_GT(tested, 100);
}

TEST(UpdateStore, WithoutReuseMatchesCorr) {
  SeededRng setup(8);
  const Matrix H = random_spd(6, 1.0, 1e3, setup);
  FunctionOracle f1 = quadratic(H), f2 = quadratic(H);
  HessianEstimate a(PDMatrix::identity(6)), b(PDMatrix::identity(6));
  SeededRng ra(9), rb(9);
  CurvatureStore store(72);
  const Vector x = setup.normal_vector(6);
  for (int k = 0; k < 100; ++k) {
    update_corr(f1, x, f1.value(x), a, 1.0, ra);
    update_store(f2, x, f2.value(x), b, 1.0, false, 0, store, rb, k);
    ASSERT_EQ(a.B(), b.B());
  }
  EXPECT_EQ(f1.evaluations(), f2.evaluations());
  EXPECT_EQ(store.size(), 72u);
}

TEST(CurvatureStore, EvictsOldest) {
  CurvatureStore s(3);
  for (int i = 0; i < 5; ++i) s.push({Vector::Ones(1), static_cast<double>(i), i});
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].stamp, 2);
  EXPECT_EQ(s[2].stamp, 4);
  EXPECT_THROW(CurvatureStore(0), std::invalid_argument);
}

// One reuse pass over h = 5 n^2 stored exact pairs contracts the error at
// least like (1 - (1 - eps) 2/(n(n+2)))^h on average, eps = 1/2.
TEST(ReuseStore, OnePassContracts) {
  SeededRng rng(10);
  const int n = 6, h = 5 * n * n;
  const double per_update = 1.0 - 0.5 * 2.0 / (n * (n + 2.0));
  std::vector<double> ratios;
  for (int rep = 0; rep < 200; ++rep) {
    const Matrix H = random_spd(n, 1.0, 4.0, rng);
    const Matrix B0 = random_spd(n, 1.0, 4.0, rng);
    CurvatureStore store(h);
    for (int i = 0; i < h; ++i) {
      const Vector u = rng.normal_vector(n).normalized();
      store.push({u, u.dot(H * u), i});
    }
    HessianEstimate est{PDMatrix(B0)};
    UpdateOutcome o;
    reuse_store(est, store, 1, rng, o);
    EXPECT_EQ(o.reuse_applied + o.reuse_skipped, h);
    EXPECT_TRUE(pd_check(est.B()));
    ratios.push_back(g_err(est.B(), H) / g_err(B0, H));
  }
  EXPECT_LE(mean_se(ratios).mean, std::pow(per_update, h));
}

TEST(SmallestEigvec, Examples) {
  Vector d(2);
  d << 3, -1;
  const SmallestEig se = smallest_eigvec(SymmetricMatrix::diagonal(d));
  EXPECT_DOUBLE_EQ(se.lambda, -1.0);
  EXPECT_NEAR(std::abs(se.v(1)), 1.0, 1e-15);
  const SmallestEig id = smallest_eigvec(SymmetricMatrix::identity(4));
  EXPECT_NEAR(id.lambda, 1.0, 1e-15);
  EXPECT_NEAR(id.v.norm(), 1.0, 1e-15);
  EXPECT_LE((Matrix::Identity(4, 4) * id.v - id.v).norm(), 1e-15);
}

TEST(SmallestEigvec, MatchesFullSolve) {
  SeededRng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const Matrix A = vmrp::testing::random_symmetric(5, rng);
    const SmallestEig se = smallest_eigvec(SymmetricMatrix(A));
    EXPECT_NEAR(se.lambda, vmrp::testing::eigenvalues(A)(0), 1e-10);
    EXPECT_LE((A * se.v - se.lambda * se.v).norm(), 1e-10);
  }
}

TEST(ShermanMorrison, Examples) {
  const Matrix I = Matrix::Identity(3, 3);
  EXPECT_EQ(sherman_morrison_inverse(I, Vector::Unit(3, 1), 0.0), I);
  Matrix expected = I;
  expected(0, 0) = 0.5;
  EXPECT_LE((sherman_morrison_inverse(I, Vector::Unit(3, 0), 1.0) - expected).norm(), 1e-15);
  EXPECT_THROW(sherman_morrison_inverse(I, Vector::Unit(3, 0), -1.0), std::domain_error);
}

TEST(ShermanMorrison, MatchesDenseInverse) {
  SeededRng rng(12);
  int tested = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const PDMatrix B(random_spd(6, 0.1, 10.0, rng));
    const Vector u = rng.normal_vector(6);
    const double binv = u.dot(B.inverse() * u);
    const double t = (rng.uniform() * 3.0 - 0.95) / binv;
    if (!rank1_pd_criterion(binv, t)) continue;
    ++tested;
    const Matrix R = sherman_morrison_inverse(B.inverse(), u, t);
    EXPECT_LT(((B.matrix() + t * u * u.transpose()) * R - Matrix::Identity(6, 6)).norm(), 1e-8);
  }
  EXPECT_GT(tested, 150);
}

TEST(HessianEstimate, InverseDriftStaysBounded) {
  SeededRng rng(13);
  const Matrix H = random_spd(8, 1.0, 1e4, rng);
  HessianEstimate est(PDMatrix::identity(8));
  for (int k = 0; k < 2000; ++k) {
    const Vector u = sample_sphere(8, rng);
    const double t = u.dot(H * u) - u.dot(est.B() * u);
    if (!rank1_pd_criterion(u.dot(est.B_inv() * u), t)) continue;
    est.rank1(u, t);
    ASSERT_LT(est.inverse_residual(), 1e-8);
  }
}

TEST(HessianEstimate, FactorTracksUpdates) {
  HessianEstimate est(PDMatrix::identity(3));
  const Matrix L0 = est.factor();
  est.rank1(Vector::Unit(3, 2), 3.0);
  const Matrix& L = est.factor();
  EXPECT_NE(L, L0);
  EXPECT_LE((L * L.transpose() - est.B()).norm(), 1e-14);
  est.rank1(Vector::Unit(3, 2), -10.0);
  EXPECT_FALSE(est.is_pd());
  EXPECT_THROW(est.factor(), NotPositiveDefinite);
}
