#include <gtest/gtest.h>

#include <random>

#include "crk/pseudoinverse.hpp"
#include "crk/rank.hpp"
#include "test_util.hpp"

using namespace crk;

namespace {

double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

void expect_penrose(const Eigen::MatrixXd& m, const Eigen::MatrixXd& p, double tol) {
  EXPECT_LE(rel(m * p * m, m), tol);
  EXPECT_LE(rel(p * m * p, p), tol);
  EXPECT_LE(rel((m * p).transpose(), m * p), tol);
  EXPECT_LE(rel((p * m).transpose(), p * m), tol);
}

struct Case {
  std::string name;
  int n;
};

std::vector<Case> constant_rank_builtins() {
  std::vector<Case> out;
  for (int n : {2, 3})
    for (const char* name : {"gradient", "divergence", "laplacian", "symmetric_gradient", "hessian"})
      out.push_back({name, n});
  out.push_back({"curl3", 3});
  return out;
}

}  // namespace

TEST(MpNumeric, Examples) {
  Eigen::Matrix2d d;
  d << 2, 0, 0, 0;
  Eigen::Matrix2d expected;
  expected << 0.5, 0, 0, 0;
  EXPECT_LE((mp_numeric(d) - expected).norm(), 1e-15);
  EXPECT_TRUE(mp_numeric(Eigen::MatrixXd::Zero(3, 2)).isZero(0.0));
  EXPECT_EQ(mp_numeric(Eigen::MatrixXd::Zero(3, 2)).rows(), 2);
}

TEST(MpNumeric, PenroseIdentitiesOnRankDeficient) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd a(4, 2), b(2, 3);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
    for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = g(rng);
    const Eigen::MatrixXd m = a * b;
    expect_penrose(m, mp_numeric(m), 1e-10);
  }
}

TEST(SymbolicPseudoinverse, Gradient) {
  for (int n : {2, 3}) {
    const MatPoly b = builtin("gradient", n).symbol();
    const RationalMatSymbol mp = symbolic_pseudoinverse(b, 1);
    EXPECT_EQ(mp.denominator, ScalarPoly::squared_norm(n));
    EXPECT_EQ(mp.numerator, b.adjoint());
    EXPECT_EQ(mp.homogeneity(), -1);
  }
}

TEST(SymbolicPseudoinverse, Curl) {
  const MatPoly c = builtin("curl3", 3).symbol();
  const RationalMatSymbol mp = symbolic_pseudoinverse(c, 2);
  const ScalarPoly r2 = ScalarPoly::squared_norm(3);
  EXPECT_EQ(mp.denominator, r2 * r2);
  EXPECT_EQ(mp.numerator, r2 * c.adjoint());
  EXPECT_EQ(mp.denominator.degree(), 4);
  EXPECT_EQ(mp.numerator.degree(), 3);
}

TEST(SymbolicPseudoinverse, Laplacian) {
  const MatPoly l = builtin("laplacian", 2).symbol();
  const RationalMatSymbol mp = symbolic_pseudoinverse(l, 1);
  const ScalarPoly r2 = ScalarPoly::squared_norm(2);
  EXPECT_EQ(mp.denominator, r2 * r2);
  EXPECT_EQ(mp.numerator, MatPoly::scalar_identity(r2, 1));
}

TEST(SymbolicPseudoinverse, WrongRankIsRejected) {
  const MatPoly c = builtin("curl3", 3).symbol();
  EXPECT_THROW(symbolic_pseudoinverse(c, 1), RankMismatch);
  EXPECT_THROW(symbolic_pseudoinverse(c, 3), RankMismatch);
  EXPECT_THROW(symbolic_pseudoinverse(c, 0), RankMismatch);
  EXPECT_THROW(symbolic_pseudoinverse(builtin("partial1", 2).symbol(), 1), RankMismatch);
}

TEST(SymbolicPseudoinverse, MatchesSvdAndPenrose) {
  std::mt19937_64 rng(4);
  for (const auto& [name, n] : constant_rank_builtins()) {
    const Operator op = builtin(name, n);
    const RankReport rep = rank_profile(op);
    const RationalMatSymbol mp = symbolic_pseudoinverse(op.symbol(), rep.r);
    EXPECT_EQ(mp.denominator.degree(), 2 * op.k() * rep.r) << name;
    EXPECT_EQ(mp.numerator.degree(), 2 * op.k() * rep.r - op.k()) << name;
    for (int s = 0; s < 100; ++s) {
      const Eigen::VectorXd xi = crk::testing::random_unit(rng, n);
      const Eigen::MatrixXd bx = op.symbol()(xi);
      const Eigen::MatrixXd px = mp(xi);
      EXPECT_LE((px - mp_numeric(bx)).cwiseAbs().maxCoeff(), 1e-8) << name;
      expect_penrose(bx, px, 1e-9);
    }
  }
}

TEST(SymbolicPseudoinverse, Homogeneity) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> lam(0.1, 10.0);
  for (const auto& [name, n] : constant_rank_builtins()) {
    const Operator op = builtin(name, n);
    const RationalMatSymbol mp = symbolic_pseudoinverse(op.symbol(), rank_profile(op).r);
    for (int s = 0; s < 20; ++s) {
      const Eigen::VectorXd xi = crk::testing::random_unit(rng, n);
      const double l = lam(rng);
      const Eigen::MatrixXd scaled = mp(Eigen::VectorXd(l * xi));
      const Eigen::MatrixXd expected = std::pow(l, -op.k()) * mp(xi);
      EXPECT_LE((scaled - expected).norm(), 1e-10 * expected.norm()) << name;
    }
  }
}

TEST(ProjectorSymbols, Divergence) {
  for (int n : {2, 3}) {
    const MatPoly b = builtin("divergence", n).symbol();
    const ProjectorSymbols pr = projector_symbols(b, symbolic_pseudoinverse(b, 1));
    EXPECT_EQ(pr.image.numerator, MatPoly::scalar_identity(pr.image.denominator, 1));
    // |xi|^2 Id - xi xi^T over |xi|^2.
    const MatPoly col = b.adjoint();
    EXPECT_EQ(pr.kernel.denominator, ScalarPoly::squared_norm(n));
    EXPECT_EQ(pr.kernel.numerator, MatPoly::scalar_identity(ScalarPoly::squared_norm(n), n) - col * b);
  }
}

TEST(ProjectorSymbols, GradientAndCurl) {
  const MatPoly g = builtin("gradient", 3).symbol();
  EXPECT_TRUE(projector_symbols(g, symbolic_pseudoinverse(g, 1)).kernel.numerator.is_zero());

  const MatPoly c = builtin("curl3", 3).symbol();
  const ProjectorSymbols pr = projector_symbols(c, symbolic_pseudoinverse(c, 2));
  const MatPoly grad = builtin("gradient", 3).symbol();
  // xi xi^T / |xi|^2, stored as |xi|^2 xi xi^T / |xi|^4.
  EXPECT_EQ(pr.kernel.numerator, ScalarPoly::squared_norm(3) * (grad * grad.adjoint()));
}

TEST(ProjectorSymbols, SymmetricIdempotentWithTraces) {
  std::mt19937_64 rng(12);
  for (const auto& [name, n] : constant_rank_builtins()) {
    const Operator op = builtin(name, n);
    const int r = rank_profile(op).r;
    const ProjectorSymbols pr = projector_symbols(op.symbol(), symbolic_pseudoinverse(op.symbol(), r));
    EXPECT_EQ(pr.image.rank, r);
    EXPECT_EQ(pr.kernel.rank, op.dim_v() - r);
    for (int s = 0; s < 20; ++s) {
      const Eigen::VectorXd xi = crk::testing::random_unit(rng, n);
      const Eigen::MatrixXd pi = pr.image(xi);
      const Eigen::MatrixXd pk = pr.kernel(xi);
      EXPECT_LE((pi - pi.transpose()).norm(), 1e-10);
      EXPECT_LE((pk - pk.transpose()).norm(), 1e-10);
      EXPECT_LE((pi * pi - pi).norm(), 1e-10);
      EXPECT_LE((pk * pk - pk).norm(), 1e-10);
      EXPECT_NEAR(pi.trace(), r, 1e-10) << name;
      EXPECT_NEAR(pk.trace(), op.dim_v() - r, 1e-10) << name;
    }
  }
}
