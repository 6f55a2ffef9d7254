#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <complex>
#include <random>

#include "crk/operator.hpp"
#include "crk/poly.hpp"
#include "test_util.hpp"

using namespace crk;
using crk::testing::as_span;

namespace {

long binomial(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Coefficients c_1..c_m of prod_i (lambda - mu_i), from numeric eigenvalues.
std::vector<double> charpoly_from_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  std::vector<std::complex<double>> c{1.0};
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const std::complex<double> mu = es.eigenvalues()(i);
    std::vector<std::complex<double>> next(c.size() + 1, 0.0);
    for (std::size_t j = 0; j < c.size(); ++j) {
      next[j] += c[j];
      next[j + 1] -= mu * c[j];
    }
    c = next;
  }
  std::vector<double> out;
  for (std::size_t j = 1; j < c.size(); ++j) out.push_back(c[j].real());
  return out;
}

MatPoly xi_column(int n) {
  MatPoly p(n, 1, n, 1);
  for (int i = 0; i < n; ++i) {
    Matrix<Rational> c(n, 1);
    c(i, 0) = 1;
    p.add_term(MultiIndex::unit(n, i), c);
  }
  return p;
}

}  // namespace

TEST(MultiIndex, EnumerationOrderAndCount) {
  const auto idx = enumerate_multiindices(2, 2);
  ASSERT_EQ(idx.size(), 3u);
  EXPECT_EQ(idx[0], (MultiIndex{2, 0}));
  EXPECT_EQ(idx[1], (MultiIndex{1, 1}));
  EXPECT_EQ(idx[2], (MultiIndex{0, 2}));

  EXPECT_EQ(enumerate_multiindices(3, 1).size(), 3u);
  const auto one = enumerate_multiindices(1, 5);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], (MultiIndex{5}));

  for (int n = 1; n <= 4; ++n)
    for (int k = 0; k <= 6; ++k) {
      const auto all = enumerate_multiindices(n, k);
      EXPECT_EQ(static_cast<long>(all.size()), binomial(n + k - 1, k));
      for (std::size_t i = 0; i < all.size(); ++i) {
        EXPECT_EQ(all[i].order(), k);
        if (i > 0) EXPECT_TRUE(MonomialOrder{}(all[i - 1], all[i]));
      }
    }
}

TEST(MultiIndex, RejectsBadArguments) {
  EXPECT_THROW(enumerate_multiindices(0, 2), ShapeMismatch);
  EXPECT_THROW(enumerate_multiindices(2, -1), ShapeMismatch);
  EXPECT_THROW(MultiIndex({1, -1}), ShapeMismatch);
}

TEST(PolyEval, GradientAndCurl) {
  const auto grad = builtin("gradient", 3).symbol();
  const Eigen::Vector3d e1(1, 0, 0);
  EXPECT_EQ(grad(e1), Eigen::Vector3d(1, 0, 0));

  const auto curl = builtin("curl3", 3).symbol();
  Eigen::Matrix3d expected;
  expected << 0, -3, 2, 3, 0, -1, -2, 1, 0;
  EXPECT_EQ(curl(Eigen::Vector3d(1, 2, 3)), expected);

  EXPECT_TRUE(curl(Eigen::Vector3d::Zero()).isZero(0.0));
  EXPECT_THROW(curl(Eigen::Vector2d(1, 2)), ShapeMismatch);
}

TEST(PolyEval, HomogeneityIsExact) {
  std::mt19937_64 rng(7);
  const MatPoly p = crk::testing::random_matpoly(rng, 3, 3, 2, 2);
  for (int trial = 0; trial < 20; ++trial) {
    auto xi = crk::testing::random_rational_point(rng, 3);
    Rational lambda(std::uniform_int_distribution<int>(1, 30)(rng), 7);
    lambda.canonicalize();
    std::vector<Rational> scaled;
    for (const auto& v : xi) scaled.push_back(lambda * v);
    Rational lambda_deg = lambda * lambda * lambda;
    EXPECT_EQ(p.evaluate_exact(scaled), p.evaluate_exact(xi) * lambda_deg);
  }
}

TEST(PolyMul, OuterProductOfXi) {
  const MatPoly col = xi_column(2);
  const MatPoly prod = col * col.adjoint();
  EXPECT_EQ(prod.degree(), 2);
  EXPECT_EQ(prod.rows(), 2);
  ASSERT_EQ(prod.terms().size(), 3u);
  Matrix<Rational> c20(2, 2), c11(2, 2), c02(2, 2);
  c20(0, 0) = 1;
  c11(0, 1) = 1;
  c11(1, 0) = 1;
  c02(1, 1) = 1;
  EXPECT_EQ(prod.terms().at(MultiIndex{2, 0}), c20);
  EXPECT_EQ(prod.terms().at(MultiIndex{1, 1}), c11);
  EXPECT_EQ(prod.terms().at(MultiIndex{0, 2}), c02);
}

TEST(PolyMul, ZeroAndAdjoint) {
  const MatPoly curl = builtin("curl3", 3).symbol();
  const MatPoly zero(3, 2, 3, 3);
  EXPECT_TRUE((curl * zero).is_zero());
  EXPECT_EQ(curl.adjoint(), -curl);
  EXPECT_THROW(curl * xi_column(3).adjoint(), ShapeMismatch);
  EXPECT_THROW(curl + curl * curl, ShapeMismatch);
}

TEST(PolyMul, RingLawsByExactEvaluation) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const MatPoly a = crk::testing::random_matpoly(rng, 2, 1, 2, 3);
    const MatPoly b = crk::testing::random_matpoly(rng, 2, 2, 3, 2);
    const MatPoly b2 = crk::testing::random_matpoly(rng, 2, 2, 3, 2);
    const MatPoly c = crk::testing::random_matpoly(rng, 2, 1, 2, 2);
    const MatPoly assoc_l = (a * b) * c;
    const MatPoly assoc_r = a * (b * c);
    const MatPoly dist_l = a * (b + b2);
    const MatPoly dist_r = a * b + a * b2;
    EXPECT_EQ(assoc_l, assoc_r);
    EXPECT_EQ(dist_l, dist_r);
    for (int s = 0; s < 10; ++s) {
      const auto xi = crk::testing::random_rational_point(rng, 2);
      EXPECT_EQ(assoc_l.evaluate_exact(xi), assoc_r.evaluate_exact(xi));
      EXPECT_EQ(dist_l.evaluate_exact(xi), dist_r.evaluate_exact(xi));
      EXPECT_EQ((a * b).evaluate_exact(xi), a.evaluate_exact(xi) * b.evaluate_exact(xi));
    }
  }
}

TEST(CharPoly, OneByOne) {
  const MatPoly m = MatPoly::scalar_identity(ScalarPoly::squared_norm(3), 1);
  const auto a = char_poly_coeffs(m);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0], -ScalarPoly::squared_norm(3));
}

TEST(CharPoly, RankOneOuterProduct) {
  for (int n = 2; n <= 4; ++n) {
    const MatPoly col = xi_column(n);
    const auto a = char_poly_coeffs(col * col.adjoint());
    ASSERT_EQ(static_cast<int>(a.size()), n);
    EXPECT_EQ(a[0], -ScalarPoly::squared_norm(n));
    for (int i = 1; i < n; ++i) {
      EXPECT_TRUE(a[static_cast<std::size_t>(i)].is_zero());
      EXPECT_EQ(a[static_cast<std::size_t>(i)].degree(), 2 * (i + 1));
    }
  }
}

TEST(CharPoly, CurlGram) {
  const MatPoly c = builtin("curl3", 3).symbol();
  const auto a = char_poly_coeffs(c * c.adjoint());
  const ScalarPoly r2 = ScalarPoly::squared_norm(3);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[0], r2 * Rational(-2));
  EXPECT_EQ(a[1], r2 * r2);
  EXPECT_TRUE(a[2].is_zero());
}

TEST(CharPoly, AgreesWithNumericEigenvalues) {
  std::mt19937_64 rng(3);
  EXPECT_THROW(char_poly_coeffs(crk::testing::random_matpoly(rng, 2, 1, 2, 3)), ShapeMismatch);
  for (int trial = 0; trial < 4; ++trial) {
    const int m = 2 + trial % 3;
    const MatPoly p = crk::testing::random_matpoly(rng, 3, 1 + trial % 2, m, m);
    const auto a = char_poly_coeffs(p);
    for (int s = 0; s < 20; ++s) {
      const Eigen::VectorXd xi = crk::testing::random_unit(rng, 3);
      const auto oracle = charpoly_from_eigenvalues(p(xi));
      double scale = 1.0;
      for (double v : oracle) scale = std::max(scale, std::abs(v));
      for (int i = 0; i < m; ++i)
        EXPECT_NEAR(a[static_cast<std::size_t>(i)](as_span(xi)), oracle[static_cast<std::size_t>(i)], 1e-9 * scale);
    }
  }
}
