#pragma once

// Sampled rank analysis of symbols on the unit sphere: constant rank,
// ellipticity, and the subspace intersections behind the canceling and
// cocanceling conditions. Sampling can refute constancy of rank, never certify it.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

#include "crk/error.hpp"
#include "crk/operator.hpp"
#include "crk/sphere.hpp"

namespace crk {

inline constexpr double kDefaultRankTol = 1e-10;
/// Cosines of principal angles below 1 - kIntersectionTol drop out of an intersection.
inline constexpr double kIntersectionTol = 1e-8;

struct RankReport {
  int r = 0;
  bool constant_rank = true;
  int min_rank = 0;
  int max_rank = 0;
  Eigen::VectorXd min_witness;
  Eigen::VectorXd max_witness;
  bool elliptic = false;
  int sample_count = 0;
};

struct SubspaceReport {
  int dimension = 0;
  Eigen::MatrixXd basis;  // orthonormal columns
  double residual = 0.0;
};

inline std::string format_point(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = std::abs(x(i)) < 1e-15 ? 0.0 : x(i);
    os << (i ? "," : "") << v;
  }
  os << ")";
  return os.str();
}

/// Coordinate axes, the deterministic rule, then n_samples seeded random points.
inline SpherePoints analysis_samples(int n, int n_samples, std::uint64_t seed = kDefaultSeed) {
  SpherePoints pts = coordinate_axes(n);
  for (auto& p : sphere_points(n, n_samples, seed)) pts.push_back(std::move(p));
  for (auto& p : random_sphere_points(n, n_samples, seed)) pts.push_back(std::move(p));
  return pts;
}

inline Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return Eigen::VectorXd();
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
}

/// Number of singular values above rel_tol * max(sigma_max, scale).
inline int numerical_rank(const Eigen::MatrixXd& m, double rel_tol, double scale = 0.0) {
  const Eigen::VectorXd s = singular_values(m);
  if (s.size() == 0) return 0;
  const double ref = std::max(s(0), scale);
  if (ref == 0.0) return 0;
  return static_cast<int>((s.array() > rel_tol * ref).count());
}

/// Orthonormal basis of the span of the first r left singular vectors.
inline Eigen::MatrixXd image_basis(const Eigen::MatrixXd& m, int r) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU);
  return svd.matrixU().leftCols(r);
}

/// Orthonormal basis of the kernel, given the rank r.
inline Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& m, int r) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(m.cols() - r);
}

inline RankReport rank_profile(const Operator& op, int n_samples, double tol = kDefaultRankTol,
                               std::uint64_t seed = kDefaultSeed) {
  if (n_samples < 50) throw Error("rank_profile needs at least 50 samples");
  if (!(tol > 0.0)) throw Error("rank tolerance must be positive");

  const SpherePoints pts = analysis_samples(op.n(), n_samples, seed);
  const MatPoly& sym = op.symbol();

  std::vector<Eigen::VectorXd> sv;
  sv.reserve(pts.size());
  double sigma_max = 0.0;
  for (const auto& xi : pts) {
    sv.push_back(singular_values(sym(xi)));
    if (sv.back().size() > 0) sigma_max = std::max(sigma_max, sv.back()(0));
  }

  RankReport rep;
  rep.sample_count = static_cast<int>(pts.size());
  rep.min_rank = std::numeric_limits<int>::max();
  rep.max_rank = -1;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const int rank = sigma_max == 0.0 ? 0 : static_cast<int>((sv[i].array() > tol * sigma_max).count());
    if (rank < rep.min_rank) {
      rep.min_rank = rank;
      rep.min_witness = pts[i];
    }
    if (rank > rep.max_rank) {
      rep.max_rank = rank;
      rep.max_witness = pts[i];
    }
  }
  rep.constant_rank = rep.min_rank == rep.max_rank;
  rep.r = rep.max_rank;
  rep.elliptic = rep.constant_rank && rep.r == op.dim_v();
  return rep;
}

inline RankReport rank_profile(const Operator& op) { return rank_profile(op, default_sample_count(op.n())); }

inline NonConstantRank non_constant_rank_error(const RankReport& rep) {
  auto to_vec = [](const Eigen::VectorXd& x) { return std::vector<double>(x.data(), x.data() + x.size()); };
  return NonConstantRank("non-constant rank (witness xi=" + format_point(rep.min_witness) + " has rank " +
                             std::to_string(rep.min_rank) + ", xi=" + format_point(rep.max_witness) +
                             " has rank " + std::to_string(rep.max_rank) + ")",
                         rep.min_rank, rep.max_rank, to_vec(rep.min_witness), to_vec(rep.max_witness));
}

inline RankReport require_constant_rank(const Operator& op, int n_samples = 0, double tol = kDefaultRankTol) {
  RankReport rep = rank_profile(op, n_samples > 0 ? n_samples : default_sample_count(op.n()), tol);
  if (!rep.constant_rank) throw non_constant_rank_error(rep);
  return rep;
}

/// Intersects subspaces S(xi) over the samples, starting from all of R^dim.
/// local_basis(xi) returns orthonormal columns spanning S(xi).
inline SubspaceReport intersect_subspaces(int dim, const SpherePoints& samples,
                                          const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& local_basis) {
  Eigen::MatrixXd u = Eigen::MatrixXd::Identity(dim, dim);
  for (const auto& xi : samples) {
    if (u.cols() == 0) break;
    const Eigen::MatrixXd s = local_basis(xi);
    if (s.cols() == 0) {
      u.resize(dim, 0);
      break;
    }
    // Cosines of the principal angles between span(u) and span(s).
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.transpose() * u, Eigen::ComputeFullV);
    const Eigen::VectorXd& cosines = svd.singularValues();
    int keep = 0;
    while (keep < cosines.size() && cosines(keep) >= 1.0 - kIntersectionTol) ++keep;
    if (keep == 0) {
      u.resize(dim, 0);
      break;
    }
    Eigen::MatrixXd kept = s * (s.transpose() * (u * svd.matrixV().leftCols(keep)));
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(kept);
    u = qr.householderQ() * Eigen::MatrixXd::Identity(dim, keep);
  }

  SubspaceReport rep;
  rep.dimension = static_cast<int>(u.cols());
  rep.basis = u;
  if (u.cols() > 0) {
    for (const auto& xi : samples) {
      const Eigen::MatrixXd s = local_basis(xi);
      const Eigen::MatrixXd defect = u - s * (s.transpose() * u);
      rep.residual = std::max(rep.residual, singular_values(defect)(0));
    }
  }
  return rep;
}

/// Intersection over the samples of im B(xi), given the constant rank r.
inline SubspaceReport image_intersection(const Operator& op, const SpherePoints& samples, int r) {
  const MatPoly& sym = op.symbol();
  return intersect_subspaces(op.dim_w(), samples, [&](const Eigen::VectorXd& xi) { return image_basis(sym(xi), r); });
}

/// Intersection over the samples of ker B(xi), given the constant rank r.
inline SubspaceReport kernel_intersection(const Operator& op, const SpherePoints& samples, int r) {
  const MatPoly& sym = op.symbol();
  return intersect_subspaces(op.dim_v(), samples, [&](const Eigen::VectorXd& xi) { return kernel_basis(sym(xi), r); });
}

/// Canceling iff the returned dimension is 0. Throws NonConstantRank.
inline SubspaceReport image_intersection(const Operator& op, int n_samples, double tol = kDefaultRankTol) {
  const RankReport rep = require_constant_rank(op, n_samples, tol);
  return image_intersection(op, analysis_samples(op.n(), n_samples), rep.r);
}

/// Cocanceling iff the returned dimension is 0. Throws NonConstantRank.
inline SubspaceReport kernel_intersection(const Operator& op, int n_samples, double tol = kDefaultRankTol) {
  const RankReport rep = require_constant_rank(op, n_samples, tol);
  return kernel_intersection(op, analysis_samples(op.n(), n_samples), rep.r);
}

inline SubspaceReport image_intersection(const Operator& op) {
  return image_intersection(op, default_sample_count(op.n()));
}
inline SubspaceReport kernel_intersection(const Operator& op) {
  return kernel_intersection(op, default_sample_count(op.n()));
}

inline bool is_canceling(const Operator& op) { return image_intersection(op).dimension == 0; }

}  // namespace crk
