#pragma once

// Fourier multipliers on periodic grids.
//
// Conventions: d_j corresponds to multiplication by i xi_j, so B(D) has the
// multiplier i^k B(xi) and K = (-i)^k B^+(xi). Modes on a Nyquist plane
// (some frequency index equal to -N/2) are discarded by B(D), K, derivatives
// and Riesz potentials, which keeps real fields real. Those modes and the zero
// mode lie in the kernel of the discrete B(D), so pi passes them through
// unchanged; u - pi u = K B(D) u then holds for every grid field.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crk/error.hpp"
#include "crk/fft.hpp"
#include "crk/grid.hpp"
#include "crk/operator.hpp"
#include "crk/poly.hpp"
#include "crk/pseudoinverse.hpp"
#include "crk/rank.hpp"

namespace crk {

enum class ZeroModeRule { zero, identity };

/// i^power for integer powers.
inline std::complex<double> i_power(int power) {
  switch (((power % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

/// m(xi) = phase * numerator(xi) / denominator(xi) * |xi|^abs_power.
class FourierMultiplier {
 public:
  FourierMultiplier(NumericMatPoly numerator, std::complex<double> phase, ZeroModeRule zero_rule,
                    std::optional<NumericMatPoly> denominator = std::nullopt, double abs_power = 0.0)
      : numerator_(std::move(numerator)),
        denominator_(std::move(denominator)),
        phase_(phase),
        zero_rule_(zero_rule),
        abs_power_(abs_power) {
    if (zero_rule_ == ZeroModeRule::identity && numerator_.rows() != numerator_.cols())
      throw ShapeMismatch("identity zero-mode rule needs a square multiplier");
  }

  int in_channels() const { return numerator_.cols(); }
  int out_channels() const { return numerator_.rows(); }

  Field apply(const Field& u) const {
    if (u.channels() != in_channels())
      throw ShapeMismatch("field has " + std::to_string(u.channels()) + " channels, multiplier expects " +
                          std::to_string(in_channels()));
    if (u.grid().n() != numerator_.n()) throw ShapeMismatch("grid dimension does not match multiplier");

    const Grid& grid = u.grid();
    const FftPlan& plan = FftPlan::get(grid.n(), grid.points());
    const std::size_t size = grid.size();
    const int n = grid.n();

    std::vector<ComplexBuffer> in;
    in.reserve(static_cast<std::size_t>(in_channels()));
    for (int c = 0; c < in_channels(); ++c) {
      ComplexBuffer buf(size);
      auto ch = u.channel(c);
      for (std::size_t i = 0; i < size; ++i) buf[i] = ch[i];
      plan.forward(buf);
      in.push_back(std::move(buf));
    }
    std::vector<ComplexBuffer> out;
    out.reserve(static_cast<std::size_t>(out_channels()));
    for (int c = 0; c < out_channels(); ++c) out.emplace_back(size);

    std::vector<double> wavenumbers(static_cast<std::size_t>(grid.points()));
    for (int m = 0; m < grid.points(); ++m) wavenumbers[static_cast<std::size_t>(m)] = grid.wavenumber(m);

    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    std::vector<double> xi(static_cast<std::size_t>(n), 0.0);
    Eigen::MatrixXd num(out_channels(), in_channels());
    Eigen::MatrixXd den(1, 1);
    Eigen::VectorXcd hat_in(in_channels());

    for (std::size_t lin = 0; lin < size; ++lin) {
      bool nyquist = false;
      bool zero = true;
      for (int a = 0; a < n; ++a) {
        const int m = idx[static_cast<std::size_t>(a)];
        nyquist = nyquist || grid.is_nyquist(m);
        zero = zero && m == 0;
        xi[static_cast<std::size_t>(a)] = wavenumbers[static_cast<std::size_t>(m)];
      }

      if (zero || nyquist) {
        if (zero_rule_ == ZeroModeRule::identity)
          for (int c = 0; c < out_channels(); ++c) out[static_cast<std::size_t>(c)][lin] = in[static_cast<std::size_t>(c)][lin];
      } else {
        numerator_.evaluate_into(xi.data(), num);
        std::complex<double> scale = phase_;
        if (denominator_) {
          denominator_->evaluate_into(xi.data(), den);
          scale /= den(0, 0);
        }
        if (abs_power_ != 0.0) {
          double r2 = 0.0;
          for (double v : xi) r2 += v * v;
          scale *= std::pow(r2, 0.5 * abs_power_);
        }
        for (int b = 0; b < in_channels(); ++b) hat_in(b) = in[static_cast<std::size_t>(b)][lin];
        for (int c = 0; c < out_channels(); ++c) {
          std::complex<double> acc = 0.0;
          for (int b = 0; b < in_channels(); ++b) acc += num(c, b) * hat_in(b);
          out[static_cast<std::size_t>(c)][lin] = scale * acc;
        }
      }

      for (int a = n - 1; a >= 0; --a) {
        if (++idx[static_cast<std::size_t>(a)] < grid.points()) break;
        idx[static_cast<std::size_t>(a)] = 0;
      }
    }

    Field result(grid, out_channels());
    const double norm = 1.0 / static_cast<double>(size);
    for (int c = 0; c < out_channels(); ++c) {
      plan.backward(out[static_cast<std::size_t>(c)]);
      auto ch = result.channel(c);
      for (std::size_t i = 0; i < size; ++i) ch[i] = out[static_cast<std::size_t>(c)][i].real() * norm;
    }
    return result;
  }

 private:
  NumericMatPoly numerator_;
  std::optional<NumericMatPoly> denominator_;
  std::complex<double> phase_;
  ZeroModeRule zero_rule_;
  double abs_power_;
};

namespace detail {

inline NumericMatPoly identity_symbol(int n, int channels, const MultiIndex& alpha, double weight = 1.0) {
  NumericMatPoly p(n, alpha.order(), channels, channels);
  p.add_term(alpha.entries, weight * Eigen::MatrixXd::Identity(channels, channels));
  return p;
}

}  // namespace detail

/// Describes one of the multipliers the engine knows how to build.
struct MultiplierSpec {
  enum class Kind { operator_symbol, projection_pi, kernel_K, derivative, riesz };

  Kind kind;
  std::optional<Operator> op;  // operator_symbol, projection_pi, kernel_K
  MultiIndex alpha;            // derivative
  double s = 0.0;              // riesz
  int channels = 1;            // derivative, riesz

  ZeroModeRule zero_mode_rule() const {
    return kind == Kind::projection_pi ? ZeroModeRule::identity : ZeroModeRule::zero;
  }
};

/// Multipliers of an operator that need its pseudoinverse (pi and K), built once.
class SpectralOperator {
 public:
  explicit SpectralOperator(Operator op)
      : op_(std::move(op)),
        rank_(require_constant_rank(op_).r),
        pseudoinverse_(symbolic_pseudoinverse(op_.symbol(), rank_)),
        symbol_(NumericMatPoly(op_.symbol()), i_power(op_.k()), ZeroModeRule::zero),
        pi_(NumericMatPoly(projector_symbols(op_.symbol(), pseudoinverse_).kernel.numerator), 1.0,
            ZeroModeRule::identity, NumericMatPoly(pseudoinverse_.denominator)),
        kernel_(NumericMatPoly(pseudoinverse_.numerator), i_power(-op_.k()), ZeroModeRule::zero,
                NumericMatPoly(pseudoinverse_.denominator)) {}

  const Operator& op() const { return op_; }
  int rank() const { return rank_; }
  const RationalMatSymbol& pseudoinverse() const { return pseudoinverse_; }

  /// B(D)u.
  Field apply(const Field& u) const { return symbol_.apply(u); }
  /// pi u, the L2 projection onto ker B(D).
  Field pi(const Field& u) const { return pi_.apply(u); }
  /// K * f with K^ = B^+.
  Field kernel(const Field& f) const { return kernel_.apply(f); }

 private:
  Operator op_;
  int rank_;
  RationalMatSymbol pseudoinverse_;
  FourierMultiplier symbol_;
  FourierMultiplier pi_;
  FourierMultiplier kernel_;
};

inline FourierMultiplier make_multiplier(const MultiplierSpec& spec) {
  using Kind = MultiplierSpec::Kind;
  switch (spec.kind) {
    case Kind::operator_symbol:
    case Kind::projection_pi:
    case Kind::kernel_K: {
      if (!spec.op) throw Error("multiplier needs an operator");
      const Operator& op = *spec.op;
      if (spec.kind == Kind::operator_symbol)
        return FourierMultiplier(NumericMatPoly(op.symbol()), i_power(op.k()), ZeroModeRule::zero);
      const int r = require_constant_rank(op).r;
      const RationalMatSymbol mp = symbolic_pseudoinverse(op.symbol(), r);
      if (spec.kind == Kind::projection_pi)
        return FourierMultiplier(NumericMatPoly(projector_symbols(op.symbol(), mp).kernel.numerator), 1.0,
                                 ZeroModeRule::identity, NumericMatPoly(mp.denominator));
      return FourierMultiplier(NumericMatPoly(mp.numerator), i_power(-op.k()), ZeroModeRule::zero,
                               NumericMatPoly(mp.denominator));
    }
    case Kind::derivative:
      return FourierMultiplier(detail::identity_symbol(spec.alpha.dimension(), spec.channels, spec.alpha),
                               i_power(spec.alpha.order()), ZeroModeRule::zero);
    case Kind::riesz:
      if (spec.alpha.dimension() < 1) throw Error("riesz multiplier needs the space dimension in alpha");
      return FourierMultiplier(detail::identity_symbol(spec.alpha.dimension(), spec.channels,
                                                       MultiIndex::zero(spec.alpha.dimension())),
                               1.0, ZeroModeRule::zero, std::nullopt, -spec.s);
  }
  throw Error("unknown multiplier kind");
}

inline Field apply_operator(const Operator& op, const Field& u) {
  if (u.channels() != op.dim_v()) throw ShapeMismatch("field channels do not match dim V of the operator");
  return make_multiplier({MultiplierSpec::Kind::operator_symbol, op, {}, 0.0, 1}).apply(u);
}

inline Field apply_pi(const Operator& op, const Field& u) {
  if (u.channels() != op.dim_v()) throw ShapeMismatch("field channels do not match dim V of the operator");
  return make_multiplier({MultiplierSpec::Kind::projection_pi, op, {}, 0.0, 1}).apply(u);
}

inline Field apply_K(const Operator& op, const Field& f) {
  if (f.channels() != op.dim_w()) throw ShapeMismatch("field channels do not match dim W of the operator");
  return make_multiplier({MultiplierSpec::Kind::kernel_K, op, {}, 0.0, 1}).apply(f);
}

/// d^alpha u, channel by channel.
inline Field apply_derivative(const MultiIndex& alpha, const Field& u) {
  if (alpha.dimension() != u.grid().n()) throw ShapeMismatch("multi-index dimension does not match grid");
  return make_multiplier({MultiplierSpec::Kind::derivative, std::nullopt, alpha, 0.0, u.channels()}).apply(u);
}

/// Multiplier |xi|^sigma for any real sigma, zero mode cleared.
inline Field apply_abs_power(double sigma, const Field& u) {
  const int n = u.grid().n();
  return FourierMultiplier(detail::identity_symbol(n, u.channels(), MultiIndex::zero(n)), 1.0, ZeroModeRule::zero,
                           std::nullopt, sigma)
      .apply(u);
}

/// Riesz potential I_s, multiplier |xi|^{-s}, for s in (0, n).
inline Field apply_riesz(double s, const Field& u) {
  const int n = u.grid().n();
  if (!(s > 0.0 && s < n)) throw InvalidExponent("Riesz potential order must lie in (0, n)");
  return make_multiplier({MultiplierSpec::Kind::riesz, std::nullopt, MultiIndex::zero(n), s, u.channels()}).apply(u);
}

/// The full tuple D^m u. Component (alpha, c) is scaled by sqrt(m!/alpha!) so
/// the pointwise channel norm equals the norm of the symmetric derivative tensor.
inline Field apply_full_derivative(int m, const Field& u) {
  const int n = u.grid().n();
  if (m < 0) throw Error("derivative order must be non-negative");
  if (m == 0) return u;
  const auto indices = enumerate_multiindices(n, m);
  const int ch = u.channels();
  NumericMatPoly sym(n, m, static_cast<int>(indices.size()) * ch, ch);
  auto factorial = [](int x) {
    double f = 1.0;
    for (int i = 2; i <= x; ++i) f *= i;
    return f;
  };
  for (std::size_t t = 0; t < indices.size(); ++t) {
    double multinomial = factorial(m);
    for (int a : indices[t].entries) multinomial /= factorial(a);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(sym.rows(), ch);
    c.block(static_cast<Eigen::Index>(t) * ch, 0, ch, ch) = std::sqrt(multinomial) * Eigen::MatrixXd::Identity(ch, ch);
    sym.add_term(indices[t].entries, c);
  }
  return FourierMultiplier(std::move(sym), i_power(m), ZeroModeRule::zero).apply(u);
}

/// Discrete L2 inner product, cell_volume * sum_i <u_i, v_i>.
inline double inner_product(const Field& u, const Field& v) {
  if (!(u.grid() == v.grid()) || u.channels() != v.channels()) throw ShapeMismatch("inner product of incompatible fields");
  double s = 0.0;
  for (std::size_t i = 0; i < u.values().size(); ++i) s += u.values()[i] * v.values()[i];
  return s * u.grid().cell_volume();
}

/// Frequency-side L2 norm (Parseval): sqrt(L^n / N^{2n} sum |u^|^2).
inline double spectral_l2_norm(const Field& u) {
  const Grid& grid = u.grid();
  const FftPlan& plan = FftPlan::get(grid.n(), grid.points());
  double s = 0.0;
  for (int c = 0; c < u.channels(); ++c) {
    ComplexBuffer buf(grid.size());
    auto ch = u.channel(c);
    for (std::size_t i = 0; i < grid.size(); ++i) buf[i] = ch[i];
    plan.forward(buf);
    for (std::size_t i = 0; i < grid.size(); ++i) s += std::norm(buf[i]);
  }
  const double total = static_cast<double>(grid.size());
  return std::sqrt(s * grid.cell_volume() / total);
}

}  // namespace crk
