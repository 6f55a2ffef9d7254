#pragma once

// Homogeneous constant-coefficient operators B(D)u = sum_{|alpha|=k} B_alpha d^alpha u
// from V = R^dimV to W = R^dimW, and a small catalog of standard ones.

#include <string>
#include <utility>
#include <vector>

#include "crk/error.hpp"
#include "crk/poly.hpp"

namespace crk {

class Operator {
 public:
  Operator(std::string name, MatPoly symbol) : name_(std::move(name)), symbol_(std::move(symbol)) {}

  Operator(std::string name, int n, int k, int dim_v, int dim_w)
      : name_(std::move(name)), symbol_(n, k, dim_w, dim_v) {}

  const std::string& name() const { return name_; }
  int n() const { return symbol_.n(); }
  int k() const { return symbol_.degree(); }
  int dim_v() const { return symbol_.cols(); }
  int dim_w() const { return symbol_.rows(); }
  const MatPoly::Terms& coeffs() const { return symbol_.terms(); }
  bool is_zero() const { return symbol_.is_zero(); }

  /// Adds B_alpha (a dimW x dimV matrix) to the coefficient of d^alpha.
  void add_term(const MultiIndex& alpha, const Matrix<Rational>& coeff) { symbol_.add_term(alpha, coeff); }

  /// B(xi) = sum_{|alpha|=k} xi^alpha B_alpha.
  const MatPoly& symbol() const { return symbol_; }

  friend bool operator==(const Operator& a, const Operator& b) {
    return a.name_ == b.name_ && a.k() == b.k() && a.symbol_ == b.symbol_;
  }

 private:
  std::string name_;
  MatPoly symbol_;
};

inline MatPoly symbol(const Operator& op) { return op.symbol(); }

/// Names accepted by builtin().
inline const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"gradient",           "divergence", "curl3",    "laplacian",
                                              "symmetric_gradient", "partial1",   "hessian"};
  return names;
}

/// Index of the (i, j) entry, i <= j, of a symmetric n x n matrix flattened row by row.
inline int sym_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}

/// Standard operators with exact coefficients. Symmetric-matrix targets are
/// flattened to n(n+1)/2 coordinates in upper-triangular row order.
inline Operator builtin(const std::string& name, int n) {
  if (n < 1) throw Error("builtin operators need n >= 1");
  const Rational one(1);
  const Rational half(1, 2);

  if (name == "gradient") {
    Operator op(name, n, 1, 1, n);
    for (int i = 0; i < n; ++i) {
      Matrix<Rational> c(n, 1);
      c(i, 0) = one;
      op.add_term(MultiIndex::unit(n, i), c);
    }
    return op;
  }
  if (name == "divergence") {
    Operator op(name, n, 1, n, 1);
    for (int i = 0; i < n; ++i) {
      Matrix<Rational> c(1, n);
      c(0, i) = one;
      op.add_term(MultiIndex::unit(n, i), c);
    }
    return op;
  }
  if (name == "curl3") {
    if (n != 3) throw Error("curl3 is only defined for n = 3");
    // C(xi) v = xi x v.
    Operator op(name, 3, 1, 3, 3);
    for (int i = 0; i < 3; ++i) {
      Matrix<Rational> c(3, 3);
      const int a = (i + 1) % 3;
      const int b = (i + 2) % 3;
      c(b, a) = one;
      c(a, b) = -one;
      op.add_term(MultiIndex::unit(3, i), c);
    }
    return op;
  }
  if (name == "laplacian") {
    Operator op(name, n, 2, 1, 1);
    for (int i = 0; i < n; ++i) op.add_term(MultiIndex::unit(n, i, 2), Matrix<Rational>::identity(1));
    return op;
  }
  if (name == "symmetric_gradient") {
    // B(xi) v = (xi (x) v + v (x) xi) / 2.
    const int dim_w = n * (n + 1) / 2;
    Operator op(name, n, 1, n, dim_w);
    for (int l = 0; l < n; ++l) {
      Matrix<Rational> c(dim_w, n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          const int row = sym_index(n, i, j);
          if (i == l) c(row, j) += half;
          if (j == l) c(row, i) += half;
        }
      op.add_term(MultiIndex::unit(n, l), c);
    }
    return op;
  }
  if (name == "partial1") {
    Operator op(name, n, 1, 1, 1);
    op.add_term(MultiIndex::unit(n, 0), Matrix<Rational>::identity(1));
    return op;
  }
  if (name == "hessian") {
    const int dim_w = n * (n + 1) / 2;
    Operator op(name, n, 2, 1, dim_w);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Matrix<Rational> c(dim_w, 1);
        c(sym_index(n, i, j), 0) = one;
        op.add_term(MultiIndex::unit(n, i) + MultiIndex::unit(n, j), c);
      }
    return op;
  }
  throw Error("unknown builtin operator '" + name + "'");
}

}  // namespace crk
