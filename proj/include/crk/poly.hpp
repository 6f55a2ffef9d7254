#pragma once

// Homogeneous scalar- and matrix-valued polynomials in n frequency variables.
// Coefficients are exact (Rational) by default; floating evaluation happens
// only when a point xi is supplied as doubles.

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crk/error.hpp"
#include "crk/rational.hpp"

namespace crk {

struct MultiIndex {
  std::vector<int> entries;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> e) : entries(std::move(e)) {
    for (int a : entries)
      if (a < 0) throw ShapeMismatch("multi-index entries must be non-negative");
  }
  MultiIndex(std::initializer_list<int> e) : MultiIndex(std::vector<int>(e)) {}

  static MultiIndex zero(int n) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(n), 0)); }
  static MultiIndex unit(int n, int axis, int power = 1) {
    MultiIndex m = zero(n);
    m.entries[static_cast<std::size_t>(axis)] = power;
    return m;
  }

  int dimension() const { return static_cast<int>(entries.size()); }
  int order() const { return std::accumulate(entries.begin(), entries.end(), 0); }
  int operator[](int i) const { return entries[static_cast<std::size_t>(i)]; }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

  friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
    if (a.entries.size() != b.entries.size()) throw ShapeMismatch("multi-index dimension mismatch");
    MultiIndex r = a;
    for (std::size_t i = 0; i < r.entries.size(); ++i) r.entries[i] += b.entries[i];
    return r;
  }
};

/// Descending lexicographic order: (2,0) < (1,1) < (0,2) in iteration order.
struct MonomialOrder {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const { return a.entries > b.entries; }
};

namespace detail {

inline void enumerate_into(int n, int k, std::vector<int>& prefix, std::vector<MultiIndex>& out) {
  if (n == 1) {
    prefix.push_back(k);
    out.emplace_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int first = k; first >= 0; --first) {
    prefix.push_back(first);
    enumerate_into(n - 1, k - first, prefix, out);
    prefix.pop_back();
  }
}

template <class U>
U monomial(const MultiIndex& alpha, std::span<const U> xi) {
  U v = ScalarTraits<U>::one();
  for (std::size_t i = 0; i < xi.size(); ++i)
    for (int e = 0; e < alpha.entries[i]; ++e) v *= xi[i];
  return v;
}

}  // namespace detail

/// All multi-indices of order k in n variables, descending lexicographic.
inline std::vector<MultiIndex> enumerate_multiindices(int n, int k) {
  if (n < 1 || k < 0) throw ShapeMismatch("enumerate_multiindices needs n >= 1 and k >= 0");
  std::vector<MultiIndex> out;
  std::vector<int> prefix;
  detail::enumerate_into(n, k, prefix, out);
  return out;
}

/// Dense row-major matrix over an exact scalar type.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), ScalarTraits<T>::zero()) {
    if (rows < 0 || cols < 0) throw ShapeMismatch("negative matrix dimension");
  }

  static Matrix identity(int m) {
    Matrix r(m, m);
    for (int i = 0; i < m; ++i) r(i, i) = ScalarTraits<T>::one();
    return r;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  T& operator()(int i, int j) { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
  const T& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i * cols_ + j)]; }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const T& x) { return ScalarTraits<T>::is_zero(x); });
  }

  Matrix transpose() const {
    Matrix r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator*(const T& s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw ShapeMismatch("matrix product shape mismatch");
    Matrix r(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int l = 0; l < a.cols_; ++l) {
        const T& ail = a(i, l);
        if (ScalarTraits<T>::is_zero(ail)) continue;
        for (int j = 0; j < b.cols_; ++j) r(i, j) += ail * b(l, j);
      }
    return r;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  Eigen::MatrixXd to_eigen() const {
    Eigen::MatrixXd m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(i, j) = ScalarTraits<T>::to_double((*this)(i, j));
    return m;
  }

 private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeMismatch("matrix shape mismatch");
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

template <class T>
class BasicScalarPoly {
 public:
  using Terms = std::map<MultiIndex, T, MonomialOrder>;

  BasicScalarPoly(int n, int degree) : n_(n), degree_(degree) {
    if (n < 1 || degree < 0) throw ShapeMismatch("polynomial needs n >= 1 and degree >= 0");
  }

  static BasicScalarPoly constant(int n, const T& c) {
    BasicScalarPoly p(n, 0);
    p.add_term(MultiIndex::zero(n), c);
    return p;
  }

  /// |xi|^2 = xi_1^2 + ... + xi_n^2.
  static BasicScalarPoly squared_norm(int n) {
    BasicScalarPoly p(n, 2);
    for (int i = 0; i < n; ++i) p.add_term(MultiIndex::unit(n, i, 2), ScalarTraits<T>::one());
    return p;
  }

  int n() const { return n_; }
  int degree() const { return degree_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const MultiIndex& alpha, const T& c) {
    if (alpha.dimension() != n_) throw ShapeMismatch("multi-index dimension does not match polynomial");
    if (alpha.order() != degree_) throw ShapeMismatch("index order mismatch");
    if (ScalarTraits<T>::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(alpha, c);
    if (!inserted) {
      it->second += c;
      if (ScalarTraits<T>::is_zero(it->second)) terms_.erase(it);
    }
  }

  double operator()(std::span<const double> xi) const {
    check_point(xi.size());
    double v = 0.0;
    for (const auto& [alpha, c] : terms_) v += ScalarTraits<T>::to_double(c) * detail::monomial(alpha, xi);
    return v;
  }
  double operator()(const Eigen::VectorXd& xi) const {
    return (*this)(std::span<const double>(xi.data(), static_cast<std::size_t>(xi.size())));
  }

  T evaluate_exact(std::span<const T> xi) const {
    check_point(xi.size());
    T v = ScalarTraits<T>::zero();
    for (const auto& [alpha, c] : terms_) v += c * detail::monomial(alpha, xi);
    return v;
  }

  BasicScalarPoly& operator*=(const T& s) {
    if (ScalarTraits<T>::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [alpha, c] : terms_) c *= s;
    return *this;
  }

  friend BasicScalarPoly operator*(BasicScalarPoly p, const T& s) { return p *= s; }
  friend BasicScalarPoly operator*(const T& s, BasicScalarPoly p) { return p *= s; }
  friend BasicScalarPoly operator-(BasicScalarPoly p) { return p *= T(-1); }

  friend BasicScalarPoly operator+(const BasicScalarPoly& a, const BasicScalarPoly& b) {
    BasicScalarPoly r(a.n_, sum_degree(a, b));
    r.check_compatible(b);
    for (const auto& [alpha, c] : a.terms_) r.add_term(alpha, c);
    for (const auto& [alpha, c] : b.terms_) r.add_term(alpha, c);
    return r;
  }
  friend BasicScalarPoly operator-(const BasicScalarPoly& a, const BasicScalarPoly& b) { return a + (-b); }

  friend BasicScalarPoly operator*(const BasicScalarPoly& a, const BasicScalarPoly& b) {
    if (a.n_ != b.n_) throw ShapeMismatch("polynomial dimension mismatch");
    BasicScalarPoly r(a.n_, a.degree_ + b.degree_);
    for (const auto& [x, cx] : a.terms_)
      for (const auto& [y, cy] : b.terms_) r.add_term(x + y, cx * cy);
    return r;
  }

  friend bool operator==(const BasicScalarPoly& a, const BasicScalarPoly& b) {
    if (a.n_ != b.n_ || a.terms_ != b.terms_) return false;
    return a.is_zero() || a.degree_ == b.degree_;
  }

 private:
  static int sum_degree(const BasicScalarPoly& a, const BasicScalarPoly& b) {
    if (a.is_zero()) return b.degree_;
    if (b.is_zero()) return a.degree_;
    if (a.degree_ != b.degree_) throw ShapeMismatch("adding polynomials of different degree");
    return a.degree_;
  }
  void check_compatible(const BasicScalarPoly& b) const {
    if (n_ != b.n_) throw ShapeMismatch("polynomial dimension mismatch");
  }
  void check_point(std::size_t size) const {
    if (static_cast<int>(size) != n_) throw ShapeMismatch("point dimension does not match polynomial");
  }

  int n_;
  int degree_;
  Terms terms_;
};

template <class T>
class BasicMatPoly {
 public:
  using Coeff = Matrix<T>;
  using Terms = std::map<MultiIndex, Coeff, MonomialOrder>;

  BasicMatPoly(int n, int degree, int rows, int cols) : n_(n), degree_(degree), rows_(rows), cols_(cols) {
    if (n < 1 || degree < 0 || rows < 1 || cols < 1) throw ShapeMismatch("invalid matrix polynomial shape");
  }

  static BasicMatPoly identity(int n, int m) {
    BasicMatPoly p(n, 0, m, m);
    p.add_term(MultiIndex::zero(n), Coeff::identity(m));
    return p;
  }

  /// s(xi) * Id_m.
  static BasicMatPoly scalar_identity(const BasicScalarPoly<T>& s, int m) {
    BasicMatPoly p(s.n(), s.degree(), m, m);
    for (const auto& [alpha, c] : s.terms()) p.add_term(alpha, Coeff::identity(m) * c);
    return p;
  }

  int n() const { return n_; }
  int degree() const { return degree_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const MultiIndex& alpha, const Coeff& c) {
    if (alpha.dimension() != n_) throw ShapeMismatch("multi-index dimension does not match polynomial");
    if (alpha.order() != degree_) throw ShapeMismatch("index order mismatch");
    if (c.rows() != rows_ || c.cols() != cols_) throw ShapeMismatch("coefficient matrix shape mismatch");
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(alpha, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  /// Floating evaluation sum_alpha xi^alpha B_alpha.
  Eigen::MatrixXd operator()(std::span<const double> xi) const {
    check_point(xi.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows_, cols_);
    for (const auto& [alpha, c] : terms_) m += detail::monomial(alpha, xi) * c.to_eigen();
    return m;
  }
  Eigen::MatrixXd operator()(const Eigen::VectorXd& xi) const {
    return (*this)(std::span<const double>(xi.data(), static_cast<std::size_t>(xi.size())));
  }

  Coeff evaluate_exact(std::span<const T> xi) const {
    check_point(xi.size());
    Coeff m(rows_, cols_);
    for (const auto& [alpha, c] : terms_) m += c * detail::monomial(alpha, xi);
    return m;
  }

  BasicMatPoly adjoint() const {
    BasicMatPoly r(n_, degree_, cols_, rows_);
    for (const auto& [alpha, c] : terms_) r.add_term(alpha, c.transpose());
    return r;
  }

  BasicScalarPoly<T> trace() const {
    if (rows_ != cols_) throw ShapeMismatch("trace of a non-square matrix polynomial");
    BasicScalarPoly<T> t(n_, degree_);
    for (const auto& [alpha, c] : terms_) {
      T s = ScalarTraits<T>::zero();
      for (int i = 0; i < rows_; ++i) s += c(i, i);
      t.add_term(alpha, s);
    }
    return t;
  }

  BasicMatPoly& operator*=(const T& s) {
    if (ScalarTraits<T>::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [alpha, c] : terms_) c *= s;
    return *this;
  }
  friend BasicMatPoly operator*(BasicMatPoly p, const T& s) { return p *= s; }
  friend BasicMatPoly operator*(const T& s, BasicMatPoly p) { return p *= s; }
  friend BasicMatPoly operator-(BasicMatPoly p) { return p *= T(-1); }

  friend BasicMatPoly operator+(const BasicMatPoly& a, const BasicMatPoly& b) {
    if (a.n_ != b.n_ || a.rows_ != b.rows_ || a.cols_ != b.cols_)
      throw ShapeMismatch("matrix polynomial shape mismatch in sum");
    int degree = a.degree_;
    if (a.is_zero()) {
      degree = b.degree_;
    } else if (!b.is_zero() && a.degree_ != b.degree_) {
      throw ShapeMismatch("adding polynomials of different degree");
    }
    BasicMatPoly r(a.n_, degree, a.rows_, a.cols_);
    for (const auto& [alpha, c] : a.terms_) r.add_term(alpha, c);
    for (const auto& [alpha, c] : b.terms_) r.add_term(alpha, c);
    return r;
  }
  friend BasicMatPoly operator-(const BasicMatPoly& a, const BasicMatPoly& b) { return a + (-b); }

  friend BasicMatPoly operator*(const BasicMatPoly& a, const BasicMatPoly& b) {
    if (a.n_ != b.n_) throw ShapeMismatch("polynomial dimension mismatch");
    if (a.cols_ != b.rows_) throw ShapeMismatch("matrix polynomial product shape mismatch");
    BasicMatPoly r(a.n_, a.degree_ + b.degree_, a.rows_, b.cols_);
    for (const auto& [x, cx] : a.terms_)
      for (const auto& [y, cy] : b.terms_) r.add_term(x + y, cx * cy);
    return r;
  }

  friend BasicMatPoly operator*(const BasicScalarPoly<T>& s, const BasicMatPoly& a) {
    if (a.n_ != s.n()) throw ShapeMismatch("polynomial dimension mismatch");
    BasicMatPoly r(a.n_, a.degree_ + s.degree(), a.rows_, a.cols_);
    for (const auto& [x, cx] : s.terms())
      for (const auto& [y, cy] : a.terms_) r.add_term(x + y, cy * cx);
    return r;
  }

  friend bool operator==(const BasicMatPoly& a, const BasicMatPoly& b) {
    if (a.n_ != b.n_ || a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.terms_ != b.terms_) return false;
    return a.is_zero() || a.degree_ == b.degree_;
  }

 private:
  void check_point(std::size_t size) const {
    if (static_cast<int>(size) != n_) throw ShapeMismatch("point dimension does not match polynomial");
  }

  int n_;
  int degree_;
  int rows_;
  int cols_;
  Terms terms_;
};

using ScalarPoly = BasicScalarPoly<Rational>;
using MatPoly = BasicMatPoly<Rational>;

template <class T>
struct FaddeevLeverrier {
  /// a_1, ..., a_steps of det(lambda Id - M) = lambda^m + a_1 lambda^{m-1} + ... + a_m.
  std::vector<BasicScalarPoly<T>> coeffs;
  /// N_steps = M^{steps-1} + a_1 M^{steps-2} + ... + a_{steps-1} Id.
  BasicMatPoly<T> auxiliary;
};

/// Runs `steps` iterations of the Faddeev-LeVerrier recursion over the polynomial ring.
template <class T>
FaddeevLeverrier<T> faddeev_leverrier(const BasicMatPoly<T>& m, int steps) {
  if (m.rows() != m.cols()) throw ShapeMismatch("characteristic polynomial of a non-square matrix polynomial");
  if (steps < 1 || steps > m.rows()) throw ShapeMismatch("Faddeev-LeVerrier step count out of range");
  const int size = m.rows();
  FaddeevLeverrier<T> out{{}, BasicMatPoly<T>::identity(m.n(), size)};
  for (int step = 1; step <= steps; ++step) {
    if (step > 1) {
      out.auxiliary = m * out.auxiliary + BasicMatPoly<T>::scalar_identity(out.coeffs.back(), size);
    }
    BasicScalarPoly<T> a = (m * out.auxiliary).trace();
    a *= T(-1) / T(step);
    // The degree label matters for the zero polynomial too.
    BasicScalarPoly<T> labelled(m.n(), step * m.degree());
    for (const auto& [alpha, c] : a.terms()) labelled.add_term(alpha, c);
    out.coeffs.push_back(std::move(labelled));
  }
  return out;
}

template <class T>
std::vector<BasicScalarPoly<T>> char_poly_coeffs(const BasicMatPoly<T>& m) {
  return faddeev_leverrier(m, m.rows()).coeffs;
}

/// Double-precision copy of a matrix polynomial for tight evaluation loops.
class NumericMatPoly {
 public:
  NumericMatPoly() = default;
  NumericMatPoly(int n, int degree, int rows, int cols) : n_(n), degree_(degree), rows_(rows), cols_(cols) {}

  template <class T>
  explicit NumericMatPoly(const BasicMatPoly<T>& p) : NumericMatPoly(p.n(), p.degree(), p.rows(), p.cols()) {
    for (const auto& [alpha, c] : p.terms()) add_term(alpha.entries, c.to_eigen());
  }

  template <class T>
  explicit NumericMatPoly(const BasicScalarPoly<T>& p) : NumericMatPoly(p.n(), p.degree(), 1, 1) {
    for (const auto& [alpha, c] : p.terms())
      add_term(alpha.entries, Eigen::MatrixXd::Constant(1, 1, ScalarTraits<T>::to_double(c)));
  }

  void add_term(std::vector<int> alpha, Eigen::MatrixXd coeff) {
    exponents_.push_back(std::move(alpha));
    coeffs_.push_back(std::move(coeff));
  }

  int n() const { return n_; }
  int degree() const { return degree_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  /// out = sum_alpha xi^alpha C_alpha; out must already be rows x cols.
  void evaluate_into(const double* xi, Eigen::MatrixXd& out) const {
    out.setZero();
    for (std::size_t t = 0; t < coeffs_.size(); ++t) {
      double mono = 1.0;
      const auto& alpha = exponents_[t];
      for (int i = 0; i < n_; ++i)
        for (int e = 0; e < alpha[static_cast<std::size_t>(i)]; ++e) mono *= xi[i];
      if (mono != 0.0) out.noalias() += mono * coeffs_[t];
    }
  }

 private:
  int n_ = 0;
  int degree_ = 0;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::vector<int>> exponents_;
  std::vector<Eigen::MatrixXd> coeffs_;
};

}  // namespace crk
