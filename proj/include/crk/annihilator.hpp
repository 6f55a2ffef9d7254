#pragma once

// Exact annihilators A(D) with ker A(xi) = im B(xi), potentials with
// im P(xi) = ker B(xi), and a checker for the pointwise exactness relation.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "crk/error.hpp"
#include "crk/operator.hpp"
#include "crk/pseudoinverse.hpp"
#include "crk/rank.hpp"

namespace crk {

struct ConstructedOperator {
  Operator op;
  /// True when the symbol is identically zero (surjective B for annihilators,
  /// elliptic B for potentials).
  bool trivial = false;
  /// Rank r of the source operator; the constructed order is 2kr.
  int source_rank = 0;
};

namespace detail {

inline RationalMatSymbol pseudoinverse_of(const Operator& op, int& rank_out) {
  const RankReport rep = require_constant_rank(op);
  if (rep.r == 0) throw RankMismatch("operator '" + op.name() + "' has a vanishing symbol");
  rank_out = rep.r;
  return symbolic_pseudoinverse(op.symbol(), rep.r);
}

}  // namespace detail

/// A(xi) = p(xi) Id_W - B(xi) Q(xi), of order 2kr from W to W.
inline ConstructedOperator exact_annihilator(const Operator& op) {
  int r = 0;
  const RationalMatSymbol mp = detail::pseudoinverse_of(op, r);
  MatPoly sym = MatPoly::scalar_identity(mp.denominator, op.dim_w()) - op.symbol() * mp.numerator;
  const bool trivial = sym.is_zero();
  // Keep the order label 2kr even for the zero symbol.
  MatPoly labelled(op.n(), 2 * op.k() * r, op.dim_w(), op.dim_w());
  for (const auto& [alpha, c] : sym.terms()) labelled.add_term(alpha, c);
  return {Operator("annihilator(" + op.name() + ")", std::move(labelled)), trivial, r};
}

/// P(xi) = p(xi) Id_V - Q(xi) B(xi), of order 2kr from V to V.
inline ConstructedOperator potential_operator(const Operator& op) {
  int r = 0;
  const RationalMatSymbol mp = detail::pseudoinverse_of(op, r);
  MatPoly sym = MatPoly::scalar_identity(mp.denominator, op.dim_v()) - mp.numerator * op.symbol();
  const bool trivial = sym.is_zero();
  MatPoly labelled(op.n(), 2 * op.k() * r, op.dim_v(), op.dim_v());
  for (const auto& [alpha, c] : sym.terms()) labelled.add_term(alpha, c);
  return {Operator("potential(" + op.name() + ")", std::move(labelled)), trivial, r};
}

struct ExactnessReport {
  double max_angle = 0.0;
  int dim_im = 0;
  int dim_ker = 0;
  bool dims_match = true;
  bool exact_product_zero = false;
  int sample_count = 0;
  bool pass = false;
};

/// Largest principal angle between the column spans of two orthonormal bases
/// of equal dimension, computed from sines so small angles keep precision.
inline double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) return std::acos(0.0);
  if (a.cols() == 0) return 0.0;
  const Eigen::MatrixXd defect = a - b * (b.transpose() * a);
  const double s = singular_values(defect)(0);
  return std::asin(std::min(1.0, s));
}

/// Checks A(xi) B(xi) = 0 as a polynomial and ker A(xi) = im B(xi) at sampled xi.
inline ExactnessReport verify_exactness(const Operator& b, const Operator& a, int n_samples = 0,
                                        double tol = 1e-8) {
  if (a.dim_v() != b.dim_w() || a.n() != b.n())
    throw ShapeMismatch("annihilator must act on the target space of the operator");
  if (n_samples <= 0) n_samples = default_sample_count(b.n());

  ExactnessReport rep;
  rep.exact_product_zero = (a.symbol() * b.symbol()).is_zero();

  const SpherePoints pts = analysis_samples(b.n(), n_samples, kDefaultSeed + 1);
  rep.sample_count = static_cast<int>(pts.size());
  for (const auto& xi : pts) {
    const Eigen::MatrixXd bx = b.symbol()(xi);
    const Eigen::MatrixXd ax = a.symbol()(xi);
    const int rb = numerical_rank(bx, kDefaultRankTol);
    const int ra = numerical_rank(ax, kDefaultRankTol);
    const Eigen::MatrixXd im = image_basis(bx, rb);
    const Eigen::MatrixXd ker = kernel_basis(ax, ra);
    rep.dim_im = std::max(rep.dim_im, static_cast<int>(im.cols()));
    rep.dim_ker = std::max(rep.dim_ker, static_cast<int>(ker.cols()));
    if (im.cols() != ker.cols()) {
      rep.dims_match = false;
      rep.max_angle = std::acos(0.0);
      continue;
    }
    rep.max_angle = std::max(rep.max_angle, max_principal_angle(im, ker));
  }
  rep.pass = rep.exact_product_zero && rep.dims_match && rep.max_angle <= tol;
  return rep;
}

}  // namespace crk
