#pragma once

// Periodic grids on the box [0, L)^n and multi-channel real fields sampled on them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "crk/error.hpp"

namespace crk {

class Grid {
 public:
  Grid(int n, int points, double length = 2.0 * std::numbers::pi) : n_(n), points_(points), length_(length) {
    if (n < 1) throw Error("grid dimension must be >= 1");
    if (points < 8 || (points & (points - 1)) != 0) throw Error("grid size must be a power of two >= 8");
    if (!(length > 0.0)) throw Error("grid box length must be positive");
  }

  int n() const { return n_; }
  /// Points per axis.
  int points() const { return points_; }
  double length() const { return length_; }
  double spacing() const { return length_ / points_; }
  double cell_volume() const { return std::pow(spacing(), n_); }

  std::size_t size() const {
    std::size_t s = 1;
    for (int i = 0; i < n_; ++i) s *= static_cast<std::size_t>(points_);
    return s;
  }

  /// Position of grid index m along an axis.
  double coordinate(int m) const { return m * spacing(); }

  /// Centered integer frequency of FFT index m, in [-N/2, N/2).
  int frequency_index(int m) const { return m < points_ / 2 ? m : m - points_; }
  double wavenumber(int m) const { return frequency_index(m) * 2.0 * std::numbers::pi / length_; }
  bool is_nyquist(int m) const { return m == points_ / 2; }

  /// Axis 0 varies slowest.
  std::vector<int> unravel(std::size_t index) const {
    std::vector<int> m(static_cast<std::size_t>(n_));
    for (int a = n_ - 1; a >= 0; --a) {
      m[static_cast<std::size_t>(a)] = static_cast<int>(index % static_cast<std::size_t>(points_));
      index /= static_cast<std::size_t>(points_);
    }
    return m;
  }

  std::size_t ravel(std::span<const int> m) const {
    std::size_t index = 0;
    for (int a = 0; a < n_; ++a) index = index * static_cast<std::size_t>(points_) + static_cast<std::size_t>(m[static_cast<std::size_t>(a)]);
    return index;
  }

  /// Index of the box centre (L/2, ..., L/2).
  std::vector<int> center() const { return std::vector<int>(static_cast<std::size_t>(n_), points_ / 2); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int n_;
  int points_;
  double length_;
};

/// m real channels per grid point, stored channel by channel.
class Field {
 public:
  Field(Grid grid, int channels) : grid_(grid), channels_(channels), values_(grid.size() * static_cast<std::size_t>(channels), 0.0) {
    if (channels < 1) throw Error("a field needs at least one channel");
  }

  /// Samples f(x, out) at every grid point; out has `channels` entries.
  template <class F>
  static Field sample(const Grid& grid, int channels, F&& f) {
    Field field(grid, channels);
    std::vector<double> x(static_cast<std::size_t>(grid.n()));
    std::vector<double> out(static_cast<std::size_t>(channels));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto m = grid.unravel(i);
      for (int a = 0; a < grid.n(); ++a) x[static_cast<std::size_t>(a)] = grid.coordinate(m[static_cast<std::size_t>(a)]);
      std::fill(out.begin(), out.end(), 0.0);
      f(std::span<const double>(x), std::span<double>(out));
      for (int c = 0; c < channels; ++c) field.at(c, i) = out[static_cast<std::size_t>(c)];
    }
    return field;
  }

  const Grid& grid() const { return grid_; }
  int channels() const { return channels_; }
  std::size_t points() const { return grid_.size(); }

  double& at(int c, std::size_t i) { return values_[static_cast<std::size_t>(c) * grid_.size() + i]; }
  double at(int c, std::size_t i) const { return values_[static_cast<std::size_t>(c) * grid_.size() + i]; }

  std::span<double> channel(int c) { return {values_.data() + static_cast<std::size_t>(c) * grid_.size(), grid_.size()}; }
  std::span<const double> channel(int c) const {
    return {values_.data() + static_cast<std::size_t>(c) * grid_.size(), grid_.size()};
  }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  Field& operator+=(const Field& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  Field& operator*=(double s) {
    for (auto& v : values_) v *= s;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator*(double s, Field a) { return a *= s; }

  /// Pointwise Euclidean norm over channels.
  std::vector<double> magnitude() const {
    std::vector<double> m(grid_.size(), 0.0);
    for (int c = 0; c < channels_; ++c) {
      auto ch = channel(c);
      for (std::size_t i = 0; i < m.size(); ++i) m[i] += ch[i] * ch[i];
    }
    for (auto& v : m) v = std::sqrt(v);
    return m;
  }

 private:
  void check_compatible(const Field& o) const {
    if (!(grid_ == o.grid_) || channels_ != o.channels_) throw ShapeMismatch("fields live on different grids or channel counts");
  }

  Grid grid_;
  int channels_;
  std::vector<double> values_;
};

}  // namespace crk
