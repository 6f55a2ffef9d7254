#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "crk/annihilator.hpp"
#include "crk/rank.hpp"
#include "test_util.hpp"

using namespace crk;

TEST(RankProfile, Curl) {
  const RankReport rep = rank_profile(builtin("curl3", 3));
  EXPECT_EQ(rep.r, 2);
  EXPECT_TRUE(rep.constant_rank);
  EXPECT_FALSE(rep.elliptic);
  EXPECT_GE(rep.sample_count, 500);
}

TEST(RankProfile, GradientIsElliptic) {
  for (int n : {1, 2, 3, 4}) {
    const RankReport rep = rank_profile(builtin("gradient", n));
    EXPECT_EQ(rep.r, 1);
    EXPECT_TRUE(rep.constant_rank);
    EXPECT_TRUE(rep.elliptic);
  }
}

TEST(RankProfile, PartialDerivativeIsNotConstantRank) {
  const RankReport rep = rank_profile(builtin("partial1", 2), 257);
  EXPECT_EQ(rep.min_rank, 0);
  EXPECT_EQ(rep.max_rank, 1);
  EXPECT_FALSE(rep.constant_rank);
  EXPECT_FALSE(rep.elliptic);
  EXPECT_EQ(rep.min_witness, Eigen::Vector2d(0, 1));
}

TEST(RankProfile, ZeroSymbolAndPreconditions) {
  Operator zero("zero", 2, 1, 2, 3);
  const RankReport rep = rank_profile(zero, 60);
  EXPECT_EQ(rep.r, 0);
  EXPECT_TRUE(rep.constant_rank);
  EXPECT_THROW(rank_profile(zero, 10), Error);
  EXPECT_THROW(rank_profile(zero, 60, 0.0), Error);
}

TEST(RankProfile, FreshSamplesAgree) {
  std::mt19937_64 rng(21);
  for (const auto& name : builtin_names()) {
    if (name == "partial1") continue;
    const Operator op = builtin(name, 3);
    const RankReport rep = rank_profile(op);
    ASSERT_TRUE(rep.constant_rank) << name;
    for (int s = 0; s < 500; ++s) {
      const Eigen::VectorXd xi = crk::testing::random_unit(rng, 3);
      EXPECT_EQ(numerical_rank(op.symbol()(xi), kDefaultRankTol), rep.r) << name;
    }
  }
}

TEST(ImageIntersection, Divergence) {
  for (int n : {1, 2, 3}) {
    const SubspaceReport rep = image_intersection(builtin("divergence", n));
    EXPECT_EQ(rep.dimension, 1);
    EXPECT_NEAR(std::abs(rep.basis(0, 0)), 1.0, 1e-12);
  }
}

TEST(ImageIntersection, CurlIsCanceling) {
  const SubspaceReport rep = image_intersection(builtin("curl3", 3));
  EXPECT_EQ(rep.dimension, 0);
  EXPECT_TRUE(is_canceling(builtin("curl3", 3)));
}

TEST(ImageIntersection, LaplacianAndOthers) {
  EXPECT_EQ(image_intersection(builtin("laplacian", 2)).dimension, 1);
  EXPECT_EQ(image_intersection(builtin("gradient", 3)).dimension, 0);
  EXPECT_EQ(image_intersection(builtin("symmetric_gradient", 3)).dimension, 0);
  EXPECT_EQ(image_intersection(builtin("hessian", 2)).dimension, 0);
  EXPECT_THROW(image_intersection(builtin("partial1", 2)), NonConstantRank);
}

TEST(ImageIntersection, ContainedInFreshImages) {
  std::mt19937_64 rng(33);
  for (int n : {2, 3}) {
    const Operator op = builtin("divergence", n);
    const SubspaceReport rep = image_intersection(op);
    for (int s = 0; s < 100; ++s) {
      const Eigen::MatrixXd im = image_basis(op.symbol()(crk::testing::random_unit(rng, n)), 1);
      const Eigen::MatrixXd defect = rep.basis - im * (im.transpose() * rep.basis);
      EXPECT_LE(defect.norm(), 10 * kDefaultRankTol);
    }
  }
}

TEST(ImageIntersection, OrderIndependent) {
  // W = R^3 with a one-dimensional intersection.
  Operator op("stacked", 2, 1, 2, 3);
  for (int i = 0; i < 2; ++i) {
    Matrix<Rational> c(3, 2);
    c(0, i) = 1;
    op.add_term(MultiIndex::unit(2, i), c);
  }
  // B(xi) v = (xi.v, 0, 0): image is e1 always, intersection span(e1).
  SpherePoints pts = analysis_samples(2, 257);
  const SubspaceReport a = image_intersection(op, pts, 1);
  std::mt19937_64 rng(1);
  std::shuffle(pts.begin(), pts.end(), rng);
  const SubspaceReport b = image_intersection(op, pts, 1);
  ASSERT_EQ(a.dimension, b.dimension);
  EXPECT_LE(max_principal_angle(a.basis, b.basis), 1e-8);

  // Two divergences stacked: W = R^3, image span(e1, e2) for every xi.
  Operator pair("div_pair", 2, 1, 4, 3);
  for (int i = 0; i < 2; ++i) {
    Matrix<Rational> c(3, 4);
    c(0, i) = 1;
    c(1, 2 + i) = 1;
    pair.add_term(MultiIndex::unit(2, i), c);
  }
  const SubspaceReport c = image_intersection(pair, pts, 2);
  std::shuffle(pts.begin(), pts.end(), rng);
  const SubspaceReport d = image_intersection(pair, pts, 2);
  ASSERT_EQ(c.dimension, 2);
  EXPECT_EQ(d.dimension, 2);
  EXPECT_LE(max_principal_angle(c.basis, d.basis), 1e-8);
}

TEST(KernelIntersection, Examples) {
  EXPECT_EQ(kernel_intersection(builtin("divergence", 2)).dimension, 0);
  EXPECT_EQ(kernel_intersection(builtin("divergence", 3)).dimension, 0);
  EXPECT_EQ(kernel_intersection(builtin("divergence", 1)).dimension, 0);

  // |xi|^2 Id - xi xi^T, the annihilator of the gradient.
  Operator ann("grad_annihilator", 3, 2, 3, 3);
  for (const auto& alpha : enumerate_multiindices(3, 2)) {
    Matrix<Rational> c(3, 3);
    for (int i = 0; i < 3; ++i) {
      if (alpha[i] == 2) {
        for (int l = 0; l < 3; ++l)
          if (l != i) c(l, l) = 1;
      }
      for (int j = 0; j < 3; ++j)
        if (i != j && alpha[i] == 1 && alpha[j] == 1) c(i, j) = -1;
    }
    ann.add_term(alpha, c);
  }
  EXPECT_EQ(rank_profile(ann).r, 2);
  EXPECT_EQ(kernel_intersection(ann).dimension, 0);

  Operator zero("zero", 2, 1, 4, 3);
  EXPECT_EQ(kernel_intersection(zero, 60).dimension, 4);
}
