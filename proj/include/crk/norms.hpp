#pragma once

// Norms of grid fields, all taken over the pointwise Euclidean channel norm.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "crk/error.hpp"
#include "crk/grid.hpp"
#include "crk/spectral.hpp"

namespace crk {

namespace norm_spec {
struct Lp {
  double p;
};
/// q may be +infinity, which gives the weak norm.
struct Lorentz {
  double p;
  double q;
};
struct Weak {
  double p;
};
struct Sup {};
/// Weighted L^q with weight |x - center|^{-(n/q - (n - j)) q}; the center cell is skipped.
struct Hardy {
  int j;
  double q;
  std::vector<int> center;
};
/// L^p norm of the |xi|^sigma multiplier image.
struct SobolevFrac {
  double sigma;
  double p;
};
}  // namespace norm_spec

using NormSpec = std::variant<norm_spec::Lp, norm_spec::Lorentz, norm_spec::Weak, norm_spec::Sup, norm_spec::Hardy,
                              norm_spec::SobolevFrac>;

namespace detail {

inline void check_p(double p) {
  if (!(p >= 1.0) || std::isinf(p)) throw InvalidExponent("exponent p must lie in [1, inf), got " + std::to_string(p));
}

inline std::vector<double> rearrangement(const Field& u) {
  auto f = u.magnitude();
  std::sort(f.begin(), f.end(), std::greater<>());
  return f;
}

}  // namespace detail

inline double lp_norm(const Field& u, double p) {
  detail::check_p(p);
  const auto f = u.magnitude();
  double s = 0.0;
  if (p == 1.0) {
    for (double v : f) s += v;
    return s * u.grid().cell_volume();
  }
  double peak = 0.0;
  for (double v : f) peak = std::max(peak, v);
  if (peak == 0.0) return 0.0;
  for (double v : f) s += std::pow(v / peak, p);
  return peak * std::pow(s * u.grid().cell_volume(), 1.0 / p);
}

inline double sup_norm(const Field& u) {
  double peak = 0.0;
  for (double v : u.magnitude()) peak = std::max(peak, v);
  return peak;
}

/// sup_t t^{1/p} f*(t) for the step-function rearrangement.
inline double weak_norm(const Field& u, double p) {
  detail::check_p(p);
  const auto f = detail::rearrangement(u);
  const double h = u.grid().cell_volume();
  double best = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) best = std::max(best, f[i] * std::pow(static_cast<double>(i + 1) * h, 1.0 / p));
  return best;
}

/// (int_0^inf (t^{1/p} f*(t))^q dt/t)^{1/q}, exact for the step function
/// f*(t) = f_i on ((i-1)h, ih].
inline double lorentz_norm(const Field& u, double p, double q) {
  detail::check_p(p);
  if (std::isinf(q) && q > 0) return weak_norm(u, p);
  if (!(q >= 1.0)) throw InvalidExponent("Lorentz exponent q must lie in [1, inf], got " + std::to_string(q));
  const auto f = detail::rearrangement(u);
  if (f.empty() || f.front() == 0.0) return 0.0;
  const double h = u.grid().cell_volume();
  const double e = q / p;
  const double peak = f.front();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == 0.0) break;
    const double k = static_cast<double>(i + 1);
    s += std::pow(f[i] / peak, q) * (std::pow(k, e) - std::pow(k - 1.0, e));
  }
  return peak * std::pow((p / q) * std::pow(h, e) * s, 1.0 / q);
}

inline double hardy_norm(const Field& u, int j, double q, std::span<const int> center) {
  const Grid& g = u.grid();
  const int n = g.n();
  if (!(q >= 1.0) || std::isinf(q)) throw InvalidExponent("Hardy exponent q must lie in [1, inf)");
  if (static_cast<int>(center.size()) != n) throw ShapeMismatch("Hardy center has the wrong dimension");
  for (int c : center)
    if (c < 0 || c >= g.points()) throw ShapeMismatch("Hardy center is not a grid point");
  const double weight_exp = (static_cast<double>(n) / q - static_cast<double>(n - j)) * q;
  const auto f = u.magnitude();
  const std::size_t skip = g.ravel(center);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i == skip || f[i] == 0.0) continue;
    const auto m = g.unravel(i);
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) {
      int d = std::abs(m[static_cast<std::size_t>(a)] - center[static_cast<std::size_t>(a)]);
      d = std::min(d, g.points() - d);
      const double dx = d * g.spacing();
      r2 += dx * dx;
    }
    s += std::pow(f[i], q) * std::pow(r2, -0.5 * weight_exp);
  }
  return std::pow(s * g.cell_volume(), 1.0 / q);
}

inline double norm(const Field& u, const NormSpec& spec) {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, norm_spec::Lp>) return lp_norm(u, s.p);
        else if constexpr (std::is_same_v<S, norm_spec::Lorentz>) return lorentz_norm(u, s.p, s.q);
        else if constexpr (std::is_same_v<S, norm_spec::Weak>) return weak_norm(u, s.p);
        else if constexpr (std::is_same_v<S, norm_spec::Sup>) return sup_norm(u);
        else if constexpr (std::is_same_v<S, norm_spec::Hardy>) return hardy_norm(u, s.j, s.q, s.center);
        else return lp_norm(apply_abs_power(s.sigma, u), s.p);
      },
      spec);
}

}  // namespace crk
