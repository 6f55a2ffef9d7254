#pragma once

// Point sets on the unit sphere S^{n-1}.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace crk {

using SpherePoints = std::vector<Eigen::VectorXd>;

inline constexpr std::uint64_t kDefaultSeed = 20190917;

/// Deterministic rule: n=1 the two points +-1, n=2 equispaced angles,
/// n=3 a Fibonacci lattice, n>=4 seeded normalized Gaussians.
inline SpherePoints sphere_points(int n, int count, std::uint64_t seed = kDefaultSeed);

/// Seeded uniform samples (normalized Gaussians; random signs for n=1).
inline SpherePoints random_sphere_points(int n, int count, std::uint64_t seed) {
  SpherePoints pts;
  pts.reserve(static_cast<std::size_t>(count));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  while (static_cast<int>(pts.size()) < count) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = gauss(rng);
    const double r = x.norm();
    if (r < 1e-12) continue;
    pts.push_back(x / r);
  }
  return pts;
}

inline SpherePoints sphere_points(int n, int count, std::uint64_t seed) {
  SpherePoints pts;
  if (n == 1) {
    pts.push_back(Eigen::VectorXd::Constant(1, 1.0));
    pts.push_back(Eigen::VectorXd::Constant(1, -1.0));
    return pts;
  }
  if (n == 2) {
    for (int i = 0; i < count; ++i) {
      const double t = 2.0 * std::numbers::pi * i / count;
      Eigen::VectorXd x(2);
      x << std::cos(t), std::sin(t);
      pts.push_back(x);
    }
    return pts;
  }
  if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * i;
      Eigen::VectorXd x(3);
      x << r * std::cos(phi), r * std::sin(phi), z;
      pts.push_back(x);
    }
    return pts;
  }
  return random_sphere_points(n, count, seed ^ 0x9e3779b97f4a7c15ULL);
}

/// Coordinate axes e_1, ..., e_n.
inline SpherePoints coordinate_axes(int n) {
  SpherePoints pts;
  for (int i = 0; i < n; ++i) pts.push_back(Eigen::VectorXd::Unit(n, i));
  return pts;
}

/// Default deterministic sample count per dimension.
inline int default_sample_count(int n) { return n == 2 ? 257 : 500; }

/// Surface measure of S^{n-1}.
inline double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace crk
