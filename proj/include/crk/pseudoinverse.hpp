#pragma once

// Moore-Penrose inverses of symbols, numerically at a point and symbolically
// as a rational function B^+(xi) = Q(xi) / p(xi).
//
// Symbolic route (Decell): with M = B B^* of size m and constant rank r,
// run Faddeev-LeVerrier for det(lambda - M) = lambda^m + a_1 lambda^{m-1} + ...
// Then a_{r+1} = ... = a_m = 0, a_r has no zeros on the sphere, and
//   B^+ = -a_r^{-1} B^* (M^{r-1} + a_1 M^{r-2} + ... + a_{r-1} Id).
// We store p = (-1)^r a_r (positive away from 0) and Q = (-1)^{r+1} B^* N_r.

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "crk/error.hpp"
#include "crk/poly.hpp"
#include "crk/rank.hpp"
#include "crk/sphere.hpp"

namespace crk {

/// M^+ by SVD with singular values <= tol * sigma_max treated as zero.
inline Eigen::MatrixXd mp_numeric(const Eigen::MatrixXd& m, double tol = 1e-12) {
  if (m.size() == 0) return Eigen::MatrixXd::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = tol * (s.size() ? s(0) : 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff && s(i) > 0.0) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// numerator(xi) / denominator(xi), a homogeneous rational matrix function.
struct RationalMatSymbol {
  MatPoly numerator;
  ScalarPoly denominator;
  int rank = 0;

  int homogeneity() const { return numerator.degree() - denominator.degree(); }

  Eigen::MatrixXd operator()(std::span<const double> xi) const { return numerator(xi) / denominator(xi); }
  Eigen::MatrixXd operator()(const Eigen::VectorXd& xi) const {
    return (*this)(std::span<const double>(xi.data(), static_cast<std::size_t>(xi.size())));
  }
};

/// B^+ = Q / p for a symbol of constant rank r >= 1. Throws RankMismatch when
/// r is inconsistent with the symbol.
inline RationalMatSymbol symbolic_pseudoinverse(const MatPoly& b, int r) {
  const int m = b.rows();
  if (r < 1 || r > std::min(b.rows(), b.cols()))
    throw RankMismatch("rank " + std::to_string(r) + " is out of range for a " + std::to_string(b.rows()) + "x" +
                       std::to_string(b.cols()) + " symbol");

  const MatPoly b_adj = b.adjoint();
  const MatPoly gram = b * b_adj;
  const auto fl = faddeev_leverrier(gram, std::min(r + 1, m));

  const ScalarPoly& a_r = fl.coeffs[static_cast<std::size_t>(r - 1)];
  if (a_r.is_zero())
    throw RankMismatch("characteristic coefficient a_" + std::to_string(r) + " vanishes identically; rank is below " +
                       std::to_string(r));
  if (r < m && !fl.coeffs[static_cast<std::size_t>(r)].is_zero())
    throw RankMismatch("characteristic coefficient a_" + std::to_string(r + 1) +
                       " is not identically zero; rank exceeds " + std::to_string(r));

  // N_r from the recursion (the last step ran one further when r < m).
  MatPoly aux = fl.auxiliary;
  if (r < m) {
    // Recompute N_r: the recursion stored N_{r+1} = M N_r + a_r Id.
    aux = faddeev_leverrier(gram, r).auxiliary;
  }

  const bool odd = r % 2 == 1;
  RationalMatSymbol out{b_adj * aux, odd ? -a_r : a_r, r};
  if (!odd) out.numerator = -out.numerator;

  const int n = b.n();
  const Eigen::VectorXd diag = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  if (out.denominator(diag) < 0.0) {
    out.denominator = -out.denominator;
    out.numerator = -out.numerator;
  }

  // p must be bounded away from zero on the sphere.
  double p_max = 0.0;
  double p_min = std::numeric_limits<double>::infinity();
  Eigen::VectorXd worst;
  for (const auto& xi : analysis_samples(n, default_sample_count(n))) {
    const double v = std::abs(out.denominator(xi));
    p_max = std::max(p_max, v);
    if (v < p_min) {
      p_min = v;
      worst = xi;
    }
  }
  if (!(p_min > 1e-12 * p_max))
    throw RankMismatch("denominator vanishes at xi=" + format_point(worst) + "; the symbol is not of constant rank " +
                       std::to_string(r));
  return out;
}

struct ProjectorSymbols {
  /// B Q / p: projector onto im B(xi), in W.
  RationalMatSymbol image;
  /// (p Id - Q B) / p: projector onto ker B(xi), in V.
  RationalMatSymbol kernel;
};

inline ProjectorSymbols projector_symbols(const MatPoly& b, const RationalMatSymbol& mp) {
  if (mp.numerator.rows() != b.cols() || mp.numerator.cols() != b.rows())
    throw ShapeMismatch("pseudoinverse shape does not match the symbol");
  const MatPoly qb = mp.numerator * b;
  MatPoly ker = MatPoly::scalar_identity(mp.denominator, b.cols()) - qb;
  return {RationalMatSymbol{b * mp.numerator, mp.denominator, mp.rank},
          RationalMatSymbol{std::move(ker), mp.denominator, b.cols() - mp.rank}};
}

}  // namespace crk
