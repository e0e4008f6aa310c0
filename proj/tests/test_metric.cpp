#include <gtest/gtest.h>

#include "support.hpp"
#include "vmrp/metric.hpp"

using namespace vmrp;
using vmrp::testing::random_spd;

TEST(SymmetricMatrix, SymmetricByConstruction) {
  Matrix m(2, 2);
  m << 1, 2, 3, 1;
  const SymmetricMatrix s(m);
  EXPECT_EQ(s(0, 1), s(1, 0));
  EXPECT_DOUBLE_EQ(s(0, 1), 2.5);
  EXPECT_THROW(SymmetricMatrix{Matrix(2, 3)}, std::invalid_argument);
}

TEST(PDMatrix, RejectsIndefinite) {
  EXPECT_THROW(PDMatrix::diagonal(Vector::Ones(1) * -1.0), NotPositiveDefinite);
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  EXPECT_THROW(PDMatrix{m}, NotPositiveDefinite);
}

TEST(PDMatrix, CachesReconstruct) {
  SeededRng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix A = random_spd(6, 0.01, 100.0, rng);
    const PDMatrix P(A);
    const Matrix& C = P.factor();
    EXPECT_LE((C * C.transpose() - A).norm() / A.norm(), 1e-10);
    EXPECT_LE((A * P.inverse() - Matrix::Identity(6, 6)).norm(), 1e-8);
  }
}

TEST(QuadNorm, Examples) {
  Vector x(2);
  x << 1, 1;
  Vector d(2);
  d << 100, 1;
  EXPECT_DOUBLE_EQ(quad_norm_sq(x, SymmetricMatrix::diagonal(d)), 101.0);
  EXPECT_DOUBLE_EQ(quad_norm_sq(Vector::Zero(3), SymmetricMatrix::identity(3)), 0.0);
  Vector y(3);
  y << 1, -2, 0.5;
  EXPECT_DOUBLE_EQ(quad_norm_sq(y, SymmetricMatrix::identity(3)), y.squaredNorm());
}

TEST(EigExtremes, Examples) {
  const EigExtremes e = eig_extremes(SymmetricMatrix::identity(4));
  EXPECT_DOUBLE_EQ(e.min, 1.0);
  EXPECT_DOUBLE_EQ(e.max, 1.0);
  Vector d(5);
  d << 300, 300, 1, 1, 1;
  const EigExtremes g = eig_extremes(SymmetricMatrix::diagonal(d));
  EXPECT_NEAR(g.min, 1.0, 1e-12);
  EXPECT_NEAR(g.max, 300.0, 1e-12);
}

// Inverse and power iteration as an independent oracle.
TEST(EigExtremes, MatchesPowerIteration) {
  SeededRng rng(5);
  const Matrix A = random_spd(4, 0.5, 7.0, rng);
  Vector v = Vector::Ones(4);
  for (int i = 0; i < 2000; ++i) v = (A * v).normalized();
  const double lmax = v.dot(A * v);
  const Eigen::PartialPivLU<Matrix> lu(A);
  Vector w = Vector::Ones(4);
  for (int i = 0; i < 2000; ++i) w = lu.solve(w).normalized();
  const double lmin = w.dot(A * w);
  const EigExtremes e = eig_extremes(SymmetricMatrix(A));
  EXPECT_NEAR(e.max, lmax, 1e-9 * lmax);
  EXPECT_NEAR(e.min, lmin, 1e-9 * lmax);
}

TEST(GeneralizedEig, Examples) {
  SeededRng rng(7);
  const PDMatrix A(random_spd(5, 0.2, 9.0, rng));
  const EigExtremes same = generalized_eig_extremes(A, A);
  EXPECT_NEAR(same.min, 1.0, 1e-12);
  EXPECT_NEAR(same.max, 1.0, 1e-12);
  const EigExtremes id = generalized_eig_extremes(A, PDMatrix::identity(5));
  const EigExtremes direct = eig_extremes(A);
  EXPECT_NEAR(id.min, direct.min, 1e-12);
  EXPECT_NEAR(id.max, direct.max, 1e-10);
  const PDMatrix B(random_spd(5, 0.2, 9.0, rng));
  const Vector oracle = vmrp::testing::generalized_eigenvalues(A.matrix(), B.matrix());
  const EigExtremes g = generalized_eig_extremes(A, B);
  EXPECT_NEAR(g.min, oracle(0), 1e-10 * oracle(4));
  EXPECT_NEAR(g.max, oracle(4), 1e-10 * oracle(4));
}

// lambda_min(B^-1 A) ||x||_B^2 <= ||x||_A^2 <= lambda_max(B^-1 A) ||x||_B^2.
TEST(GeneralizedEig, SandwichProperty) {
  SeededRng rng(11);
  for (int rep = 0; rep < 1000; ++rep) {
    const Index n = 2 + static_cast<Index>(rng.below(5));
    const PDMatrix A(random_spd(n, 0.01, 50.0, rng));
    const PDMatrix B(random_spd(n, 0.01, 50.0, rng));
    const Vector x = rng.normal_vector(n);
    const EigExtremes g = generalized_eig_extremes(A, B);
    const double xa = quad_norm_sq(x, A), xb = quad_norm_sq(x, B);
    EXPECT_GE(xa - g.min * xb, -1e-10 * xa);
    EXPECT_GE(g.max * xb - xa, -1e-10 * xa);
  }
}

TEST(EuclideanSandwich, Property) {
  SeededRng rng(13);
  for (int rep = 0; rep < 200; ++rep) {
    const PDMatrix A(random_spd(4, 0.1, 20.0, rng));
    const Vector x = rng.normal_vector(4);
    const EigExtremes e = eig_extremes(A);
    const double q = quad_norm_sq(x, A);
    EXPECT_LE(e.min * x.squaredNorm(), q * (1 + 1e-12));
    EXPECT_LE(q, e.max * x.squaredNorm() * (1 + 1e-12));
  }
}

TEST(SigmaFactor, Examples) {
  SeededRng rng(17);
  const PDMatrix A(random_spd(4, 0.3, 3.0, rng));
  const PDMatrix Ainv(A.inverse());
  for (int rep = 0; rep < 10; ++rep) {
    EXPECT_NEAR(sigma_factor(A, Ainv, rng.normal_vector(4)), 1.0, 1e-10);
  }
  EXPECT_NEAR(sigma_factor(PDMatrix::identity(3), PDMatrix::identity(3), rng.normal_vector(3)), 1.0, 1e-14);
}

TEST(SigmaFactor, BoundedByInverseLambdaMin) {
  SeededRng rng(19);
  for (int rep = 0; rep < 100; ++rep) {
    const PDMatrix A(random_spd(3, 0.1, 5.0, rng));
    const PDMatrix B(random_spd(3, 0.1, 5.0, rng));
    const Vector y = rng.normal_vector(3);
    // Explicit norms: y^T (ABA)^{-1} y / y^T A^{-1} y.
    const Matrix ABA = A.matrix() * B.matrix() * A.matrix();
    const double num = y.dot(ABA.ldlt().solve(y));
    const double den = y.dot(A.matrix().ldlt().solve(y));
    const double s = sigma_factor(A, B, y);
    EXPECT_NEAR(s, num / den, 1e-10 * s);
    // AB is similar to the symmetric A^{1/2} B A^{1/2}.
    const Matrix root = pd_sqrt(A);
    const double lmin = vmrp::testing::eigenvalues(root * B.matrix() * root).minCoeff();
    EXPECT_LE(s, (1.0 + 1e-10) / lmin);
  }
}

TEST(KappaE, IdentityIsOne) {
  SeededRng rng(23);
  const PDMatrix I = PDMatrix::identity(6);
  EXPECT_NEAR(kappa_E(I, I, I, rng.normal_vector(6)), 1.0, 1e-12);
}

TEST(KappaE, MatchesHandAssembledFormula) {
  SeededRng rng(29);
  const PDMatrix A(random_spd(3, 0.2, 4.0, rng));
  const PDMatrix B(random_spd(3, 0.2, 4.0, rng));
  const PDMatrix C(random_spd(3, 0.2, 4.0, rng));
  const Vector y = rng.normal_vector(3);
  const double tr = (A.matrix() * B.matrix()).trace();
  const double lminC = vmrp::testing::eigenvalues(C.matrix()).minCoeff();
  const double expected = (tr * sigma_factor(A, B, y) + 2.0) / (lminC * 5.0);
  EXPECT_NEAR(kappa_E(A, B, C, y), expected, 1e-12 * expected);
}

// 0 < kappa_E <= kappa_T(AB, C) <= (Tr[AB]/n) / lambda_min(AB) / lambda_min(C)
//   <= kappa(AB) / lambda_min(C).
TEST(KappaChain, RandomInstances) {
  SeededRng rng(31);
  for (int rep = 0; rep < 100; ++rep) {
    const Index n = 2 + static_cast<Index>(rng.below(6));
    const PDMatrix A(random_spd(n, 0.1, 10.0, rng));
    const PDMatrix B(random_spd(n, 0.1, 10.0, rng));
    const PDMatrix C(random_spd(n, 0.5, 2.0, rng));
    const Vector y = rng.normal_vector(n);
    const Vector ev = vmrp::testing::eigenvalues(similar_product(A, B).matrix());
    const double lminC = vmrp::testing::eigenvalues(C.matrix()).minCoeff();
    const double kE = kappa_E(A, B, C, y);
    const double kT = kappa_T(similar_product(A, B), C);
    const double mid = ev.sum() / static_cast<double>(n) / ev.minCoeff() / lminC;
    const double top = ev.maxCoeff() / ev.minCoeff() / lminC;
    EXPECT_GT(kE, 0.0);
    EXPECT_LE(kE, kT * (1 + 1e-12));
    EXPECT_LE(kT, mid * (1 + 1e-12));
    EXPECT_LE(mid, top * (1 + 1e-12));
  }
}

TEST(KappaT, Examples) {
  EXPECT_NEAR(kappa_T(PDMatrix::identity(5), PDMatrix::identity(5)), 1.0, 1e-14);
  const int n = 50, i = 25;
  const double ell = 1000.0;
  Vector d = Vector::Ones(n);
  d.head(i).setConstant(ell);
  const double nk = n * kappa_T(PDMatrix::diagonal(d));
  EXPECT_NEAR(nk, n * (i * ell + (n - i) + 2.0) / (n + 2.0), 1e-9 * nk);
}

TEST(KappaT, MatchesBruteForce) {
  SeededRng rng(37);
  const Matrix D = random_spd(5, 0.3, 8.0, rng);
  const Matrix C = random_spd(5, 0.3, 8.0, rng);
  const Vector evD = vmrp::testing::eigenvalues(D);
  const Vector evC = vmrp::testing::eigenvalues(C);
  const double expected = (evD.sum() / evD.minCoeff() + 2.0) / (evC.minCoeff() * 7.0);
  EXPECT_NEAR(kappa_T(PDMatrix(D), PDMatrix(C)), expected, 1e-10 * expected);
}

TEST(PdCheck, Examples) {
  EXPECT_TRUE(pd_check(SymmetricMatrix::identity(3)));
  Vector d(2);
  d << 1, -1;
  EXPECT_FALSE(pd_check(SymmetricMatrix::diagonal(d)));
}

TEST(Rank1Criterion, Examples) {
  EXPECT_TRUE(rank1_pd_criterion(0.7, 0.0));
  EXPECT_TRUE(rank1_pd_criterion(0.7, 1e9));
  EXPECT_TRUE(rank1_pd_criterion(1.0, -0.5));
  EXPECT_FALSE(rank1_pd_criterion(1.0, -1.0));
}

// The scalar criterion agrees with a factorization of B + t u u^T.
TEST(Rank1Criterion, AgreesWithPdCheck) {
  SeededRng rng(41);
  int compared = 0;
  for (int rep = 0; rep < 2000; ++rep) {
    const PDMatrix B(random_spd(4, 0.1, 10.0, rng));
    const Vector u = rng.normal_vector(4);
    const double binv = u.dot(B.inverse() * u);
    const double t = (rng.uniform() * 4.0 - 3.0) / binv;
    if (std::abs(1.0 + t * binv) <= 1e-8) continue;
    const Matrix T = B.matrix() + t * u * u.transpose();
    EXPECT_EQ(rank1_pd_criterion(binv, t), pd_check(SymmetricMatrix(0.5 * (T + T.transpose()))));
    ++compared;
  }
  EXPECT_GT(compared, 1900);
}

TEST(PdCheck, AcceptsWedderburnUpdate) {
  SeededRng rng(43);
  for (int rep = 0; rep < 100; ++rep) {
    const PDMatrix B(random_spd(5, 0.5, 5.0, rng));
    const Vector u = rng.normal_vector(5);
    const double binv = u.dot(B.inverse() * u);
    const double t = -0.9 / binv;
    const Matrix T = B.matrix() + t * u * u.transpose();
    EXPECT_TRUE(pd_check(SymmetricMatrix(0.5 * (T + T.transpose()))));
  }
}

TEST(ConditionNumber, Diagonal) {
  Vector d(3);
  d << 2, 8, 4;
  EXPECT_NEAR(condition_number(PDMatrix::diagonal(d)), 4.0, 1e-14);
}

TEST(SimilarProduct, PreservesTraceAndSpectrum) {
  SeededRng rng(47);
  const PDMatrix A(random_spd(4, 0.2, 5.0, rng));
  const PDMatrix B(random_spd(4, 0.2, 5.0, rng));
  const Matrix S = similar_product(A, B).matrix();
  const Matrix P = A.matrix() * B.matrix();
  EXPECT_NEAR(S.trace(), P.trace(), 1e-10 * P.trace());
  EXPECT_NEAR(trace_product(A, B), P.trace(), 1e-10 * P.trace());
  Eigen::EigenSolver<Matrix> es(P);
  Vector re = es.eigenvalues().real();
  std::sort(re.data(), re.data() + re.size());
  const Vector ev = vmrp::testing::eigenvalues(S);
  EXPECT_LE((re - ev).norm(), 1e-9 * ev.maxCoeff());
}
