#pragma once

// Numerical probes of the L^1 estimates: ratio studies on bump families,
// the rho K w blow-up family, Hardy weights, the sphere condition for L^inf
// and the potential-operator counterexample.
//
// "Bounded" (max ratio varies by less than a factor across N) and "divergent"
// (ratio growth along the epsilon ladder) are calibrations, not constants from
// the theory; both thresholds live in the configs.

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "crk/annihilator.hpp"
#include "crk/error.hpp"
#include "crk/grid.hpp"
#include "crk/norms.hpp"
#include "crk/operator.hpp"
#include "crk/rank.hpp"
#include "crk/spectral.hpp"
#include "crk/sphere.hpp"

namespace crk {

enum class Target { lp, lorentz, weak, hardy };

inline std::string target_name(Target t) {
  switch (t) {
    case Target::lp: return "lp";
    case Target::lorentz: return "lorentz";
    case Target::weak: return "weak";
    case Target::hardy: return "hardy";
  }
  return "?";
}

struct FamilySpec {
  int count = 8;
  /// Odd members carry a sin(m.(x - c)) modulation.
  bool modulated = true;
};

struct ExperimentConfig {
  explicit ExperimentConfig(Operator o) : op(std::move(o)) {}

  Operator op;
  int j = 1;
  /// Secondary Lorentz exponent, or the Hardy exponent.
  double q = 2.0;
  std::vector<int> sizes{16, 32, 64};
  FamilySpec family;
  std::uint64_t seed = kDefaultSeed;
  double length = 2.0 * std::numbers::pi;
  Target target = Target::lp;
  double bounded_factor = 2.0;
  /// Rows with ||B(D)u||_1 below degenerate_tol * max(1, ||D^k u||_1) are skipped.
  double degenerate_tol = 1e-13;
  /// Worker threads; 0 picks the hardware concurrency.
  int threads = 0;

  /// p = n / (n - j).
  double p() const { return static_cast<double>(op.n()) / static_cast<double>(op.n() - j); }

  void validate() const {
    const int n = op.n();
    if (j < 1 || j > std::min(op.k(), n - 1))
      throw InvalidExponent("j must satisfy 1 <= j <= min(k, n-1) = " + std::to_string(std::min(op.k(), n - 1)) +
                            ", got " + std::to_string(j));
    if (target == Target::lorentz && !(q >= 1.0)) throw InvalidExponent("Lorentz exponent q must lie in [1, inf]");
    if (target == Target::hardy && !(q >= 1.0 && q <= p() * (1 + 1e-15)))
      throw InvalidExponent("Hardy exponent q must lie in [1, n/(n-j)] = [1, " + std::to_string(p()) + "]");
    if (sizes.empty()) throw Error("no grid sizes given");
    if (family.count < 1) throw Error("test family is empty");
  }
};

struct RatioRow {
  int N = 0;
  std::string field_id;
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio = 0.0;
};

struct RatioSummary {
  /// Max ratio per N (ratio studies) or the ratio per epsilon (blow-up), in row order.
  std::vector<std::pair<std::string, double>> series;
  double max_ratio = 0.0;
  /// max / min of the series.
  double variation = 1.0;
  /// Least-squares slope of log(max ratio) against log N.
  double slope = 0.0;
  /// Last over first entry of the series.
  double growth = 1.0;
  bool monotone = false;
  bool numerator_monotone = false;
  /// max / min denominator (blow-up runs).
  double denominator_spread = 1.0;
  /// Calibration threshold the verdict was taken against.
  double threshold = 0.0;
  std::string verdict;
};

struct RatioTable {
  std::string experiment;
  std::string operator_name;
  std::string target;
  std::vector<RatioRow> rows;
  std::vector<std::string> notices;
  RatioSummary summary;
};

// ---------------------------------------------------------------------------
// Test fields

/// b(x) = prod_i max(0, 1 - ((x_i - c_i)/rho_i)^2)^4 times a vector amplitude
/// a0 + A1 (x - c)/rho, optionally modulated by sin(m.(x - c)).
struct BumpSpec {
  std::string id;
  std::vector<double> center;
  std::vector<double> radius;
  Eigen::VectorXd amp0;
  Eigen::MatrixXd amp1;
  std::vector<int> modulation;
};

inline std::vector<BumpSpec> bump_family(int n, int channels, const FamilySpec& fam, std::uint64_t seed,
                                         double length = 2.0 * std::numbers::pi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rad(length / 8.0, length / 4.0);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> mod(1, 3);
  std::vector<BumpSpec> out;
  for (int f = 0; f < fam.count; ++f) {
    BumpSpec b;
    b.id = "bump" + std::to_string(f);
    b.center.assign(static_cast<std::size_t>(n), length / 2.0);
    for (int a = 0; a < n; ++a) b.radius.push_back(rad(rng));
    b.amp0.resize(channels);
    for (int c = 0; c < channels; ++c) b.amp0(c) = g(rng);
    b.amp1.resize(channels, n);
    for (int c = 0; c < channels; ++c)
      for (int a = 0; a < n; ++a) b.amp1(c, a) = 0.5 * g(rng);
    if (fam.modulated && f % 2 == 1)
      for (int a = 0; a < n; ++a) b.modulation.push_back(mod(rng));
    out.push_back(std::move(b));
  }
  return out;
}

inline Field sample_bump(const BumpSpec& b, const Grid& grid) {
  const int n = grid.n();
  const int channels = static_cast<int>(b.amp0.size());
  Eigen::VectorXd s(n);
  return Field::sample(grid, channels, [&](std::span<const double> x, std::span<double> out) {
    double profile = 1.0;
    for (int a = 0; a < n; ++a) {
      s(a) = (x[static_cast<std::size_t>(a)] - b.center[static_cast<std::size_t>(a)]) / b.radius[static_cast<std::size_t>(a)];
      const double t = 1.0 - s(a) * s(a);
      if (t <= 0.0) return;
      profile *= t * t * t * t;
    }
    if (!b.modulation.empty()) {
      double arg = 0.0;
      for (int a = 0; a < n; ++a)
        arg += b.modulation[static_cast<std::size_t>(a)] * (x[static_cast<std::size_t>(a)] - b.center[static_cast<std::size_t>(a)]);
      profile *= std::sin(arg);
    }
    const Eigen::VectorXd amp = b.amp0 + b.amp1 * s;
    for (int c = 0; c < channels; ++c) out[static_cast<std::size_t>(c)] = profile * amp(c);
  });
}

// ---------------------------------------------------------------------------
// Ratio studies

namespace detail {

inline double target_norm(const Field& d, Target target, double p, double q, int j) {
  switch (target) {
    case Target::lp: return lp_norm(d, p);
    case Target::lorentz: return lorentz_norm(d, p, q);
    case Target::weak: return weak_norm(d, p);
    case Target::hardy: return hardy_norm(d, j, q, d.grid().center());
  }
  return 0.0;
}

template <class Task>
auto run_ordered(std::size_t count, int threads, Task task) -> std::vector<decltype(task(std::size_t{}))> {
  using R = decltype(task(std::size_t{}));
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(count, 1));
  std::vector<std::optional<R>> slots(count);
  std::vector<std::future<void>> pool;
  std::atomic<std::size_t> next{0};
  for (std::size_t w = 0; w < workers; ++w)
    pool.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < count; i = next++) slots[i].emplace(task(i));
    }));
  for (auto& f : pool) f.get();
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

inline double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return 0.0;
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double d = n * sxx - sx * sx;
  return d == 0.0 ? 0.0 : (n * sxy - sx * sy) / d;
}

}  // namespace detail

struct RatioSample {
  double numerator = 0.0;
  double denominator = 0.0;
};

/// ||D^{k-j}(u - pi u)||_target / ||B(D)u||_1. Throws DegenerateField when
/// u is numerically in the kernel of B(D).
inline RatioSample sobolev_ratio(const SpectralOperator& sop, const Field& u, Target target, int j, double p, double q,
                                 double degenerate_tol = 1e-13) {
  const int k = sop.op().k();
  const Field bu = sop.apply(u);
  const double den = lp_norm(bu, 1.0);
  const double scale = lp_norm(apply_full_derivative(k, u), 1.0);
  if (den < degenerate_tol * std::max(1.0, scale)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "||B(D)u||_1 = %.3g, field lies in the kernel", den);
    throw DegenerateField(buf);
  }
  const Field d = apply_full_derivative(k - j, u - sop.pi(u));
  return {detail::target_norm(d, target, p, q, j), den};
}

inline void summarize_by_size(RatioTable& t, double bounded_factor) {
  RatioSummary& s = t.summary;
  std::vector<double> logn, logr;
  std::vector<int> sizes;
  for (const auto& r : t.rows)
    if (std::find(sizes.begin(), sizes.end(), r.N) == sizes.end()) sizes.push_back(r.N);
  double lo = std::numeric_limits<double>::infinity();
  for (int N : sizes) {
    double m = 0.0;
    for (const auto& r : t.rows)
      if (r.N == N) m = std::max(m, r.ratio);
    s.series.emplace_back(std::to_string(N), m);
    s.max_ratio = std::max(s.max_ratio, m);
    lo = std::min(lo, m);
    logn.push_back(std::log(static_cast<double>(N)));
    logr.push_back(std::log(m));
  }
  s.variation = s.series.empty() || lo <= 0.0 ? std::numeric_limits<double>::infinity() : s.max_ratio / lo;
  s.slope = detail::least_squares_slope(logn, logr);
  if (!s.series.empty()) s.growth = s.series.back().second / s.series.front().second;
  s.monotone = true;
  for (std::size_t i = 1; i < s.series.size(); ++i) s.monotone = s.monotone && s.series[i].second > s.series[i - 1].second;
  s.threshold = bounded_factor;
  s.verdict = s.variation < bounded_factor ? "BOUNDED" : "DIVERGENT";
}

inline RatioTable sobolev_ratio_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const SpectralOperator sop(cfg.op);
  const auto family = bump_family(cfg.op.n(), cfg.op.dim_v(), cfg.family, cfg.seed, cfg.length);

  struct Job {
    int N;
    const BumpSpec* bump;
  };
  std::vector<Job> jobs;
  for (int N : cfg.sizes)
    for (const auto& b : family) jobs.push_back({N, &b});

  struct Outcome {
    std::optional<RatioRow> row;
    std::string notice;
  };
  const double p = cfg.p();
  auto results = detail::run_ordered(jobs.size(), cfg.threads, [&](std::size_t i) {
    const Job& job = jobs[i];
    const Field u = sample_bump(*job.bump, Grid(cfg.op.n(), job.N, cfg.length));
    Outcome o;
    try {
      const RatioSample rs = sobolev_ratio(sop, u, cfg.target, cfg.j, p, cfg.q, cfg.degenerate_tol);
      o.row = RatioRow{job.N, job.bump->id, rs.numerator, rs.denominator, rs.numerator / rs.denominator};
    } catch (const DegenerateField& e) {
      o.notice = "skipped N=" + std::to_string(job.N) + " " + job.bump->id + ": " + e.what();
    }
    return o;
  });

  RatioTable t;
  t.experiment = cfg.target == Target::hardy ? "hardy" : "sobolev";
  t.operator_name = cfg.op.name();
  t.target = target_name(cfg.target);
  for (auto& o : results) {
    if (o.row) t.rows.push_back(*o.row);
    if (!o.notice.empty()) t.notices.push_back(o.notice);
  }
  if (t.rows.empty()) throw DegenerateField("every test field lies in the kernel of " + cfg.op.name());
  summarize_by_size(t, cfg.bounded_factor);
  return t;
}

// ---------------------------------------------------------------------------
// rho K w family

/// Smooth radial cutoff: 1 for r <= inner, 0 for r >= outer.
inline double smooth_cutoff(double r, double inner, double outer) {
  if (r <= inner) return 1.0;
  if (r >= outer) return 0.0;
  auto g = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  const double s = (r - inner) / (outer - inner);
  return g(1.0 - s) / (g(1.0 - s) + g(s));
}

inline double distance_to_center(const Grid& grid, std::span<const double> x) {
  double r2 = 0.0;
  for (int a = 0; a < grid.n(); ++a) {
    const double d = x[static_cast<std::size_t>(a)] - grid.length() / 2.0;
    r2 += d * d;
  }
  return std::sqrt(r2);
}

/// exp(-1/(1 - r^2/eps^2)) around the box centre, normalized to unit discrete mass.
inline Field mollifier(const Grid& grid, double eps) {
  Field eta = Field::sample(grid, 1, [&](std::span<const double> x, std::span<double> out) {
    const double t = distance_to_center(grid, x) / eps;
    out[0] = t < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0;
  });
  double mass = 0.0;
  for (double v : eta.values()) mass += v;
  mass *= grid.cell_volume();
  if (!(mass > 0.0)) throw Error("mollifier radius is below the grid resolution");
  return eta * (1.0 / mass);
}

inline void check_in_intersection(const Operator& op, const Eigen::VectorXd& w) {
  if (w.size() != op.dim_w()) throw ShapeMismatch("w must have dim W entries");
  if (w.norm() == 0.0) throw NotInIntersection("w must be nonzero");
  const SubspaceReport inter = image_intersection(op);
  const Eigen::VectorXd defect = w - inter.basis * (inter.basis.transpose() * w);
  if (defect.norm() > kIntersectionTol * w.norm())
    throw NotInIntersection("w is not in the intersection of the images of " + op.name() + " (intersection dim " +
                            std::to_string(inter.dimension) + ")");
}

/// u_eps = rho * K(eta_eps w); rho is 1 on |x - c| <= L/8 and 0 beyond L/4.
inline std::vector<Field> rhoKw_family(const SpectralOperator& sop, const Eigen::VectorXd& w,
                                       const std::vector<double>& eps_list, int N,
                                       double length = 2.0 * std::numbers::pi) {
  const Operator& op = sop.op();
  check_in_intersection(op, w);
  const Grid grid(op.n(), N, length);
  const double inner = length / 8.0;
  const double outer = length / 4.0;
  for (double eps : eps_list)
    if (!(eps > 0.0 && eps < inner))
      throw Error("mollifier radius " + std::to_string(eps) + " must lie in (0, L/8) = (0, " + std::to_string(inner) + ")");
  const Field rho = Field::sample(grid, 1, [&](std::span<const double> x, std::span<double> out) {
    out[0] = smooth_cutoff(distance_to_center(grid, x), inner, outer);
  });

  std::vector<Field> out;
  for (double eps : eps_list) {
    const Field eta = mollifier(grid, eps);
    Field f(grid, op.dim_w());
    for (int c = 0; c < op.dim_w(); ++c)
      for (std::size_t i = 0; i < grid.size(); ++i) f.at(c, i) = w(c) * eta.at(0, i);
    Field u = sop.kernel(f);
    for (int c = 0; c < u.channels(); ++c)
      for (std::size_t i = 0; i < grid.size(); ++i) u.at(c, i) *= rho.at(0, i);
    out.push_back(std::move(u));
  }
  return out;
}

inline std::vector<Field> rhoKw_family(const Operator& op, const Eigen::VectorXd& w, const std::vector<double>& eps_list,
                                       int N, double length = 2.0 * std::numbers::pi) {
  check_in_intersection(op, w);
  return rhoKw_family(SpectralOperator(op), w, eps_list, N, length);
}

struct BlowupConfig {
  explicit BlowupConfig(Operator o) : op(std::move(o)) {}

  Operator op;
  int j = 1;
  double q = 1.5;
  std::vector<double> eps{0.25, 0.125, 0.0625};
  int N = 128;
  /// The ratio is dilation invariant, so the box only fixes the unit of eps.
  /// With L = 2.5 the smallest default eps spans about three cells at N = 128.
  double length = 2.5;
  Target target = Target::lorentz;
  /// Required last/first ratio growth.
  double growth_threshold = 1.25;
  /// Unit vector of the image intersection when empty.
  std::optional<Eigen::VectorXd> w;
  int threads = 0;
};

inline void summarize_blowup(RatioTable& t, double growth_threshold) {
  RatioSummary& s = t.summary;
  double lo = std::numeric_limits<double>::infinity();
  double dlo = lo, dhi = 0.0;
  for (const auto& r : t.rows) {
    s.series.emplace_back(r.field_id, r.ratio);
    s.max_ratio = std::max(s.max_ratio, r.ratio);
    lo = std::min(lo, r.ratio);
    dlo = std::min(dlo, r.denominator);
    dhi = std::max(dhi, r.denominator);
  }
  s.variation = s.max_ratio / lo;
  s.denominator_spread = dhi / dlo;
  s.growth = t.rows.back().ratio / t.rows.front().ratio;
  s.monotone = s.numerator_monotone = true;
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    s.monotone = s.monotone && t.rows[i].ratio > t.rows[i - 1].ratio;
    s.numerator_monotone = s.numerator_monotone && t.rows[i].numerator > t.rows[i - 1].numerator;
  }
  s.threshold = growth_threshold;
  s.verdict = s.monotone && s.growth >= growth_threshold ? "DIVERGENT" : "BOUNDED";
}

inline std::string eps_label(double eps) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "eps=%.17g", eps);
  return buf;
}

inline RatioTable blowup_experiment(const BlowupConfig& cfg) {
  const int n = cfg.op.n();
  if (cfg.j < 1 || cfg.j > std::min(cfg.op.k(), n - 1))
    throw InvalidExponent("j must satisfy 1 <= j <= min(k, n-1)");
  const double p = static_cast<double>(n) / static_cast<double>(n - cfg.j);
  if (cfg.target == Target::hardy && !(cfg.q >= 1.0 && cfg.q <= p * (1 + 1e-15)))
    throw InvalidExponent("Hardy exponent q must lie in [1, n/(n-j)]");
  if (cfg.eps.size() < 2) throw Error("the epsilon ladder needs at least two entries");

  Eigen::VectorXd w;
  if (cfg.w) {
    w = *cfg.w;
  } else {
    const SubspaceReport inter = image_intersection(cfg.op);
    if (inter.dimension == 0)
      throw NotInIntersection(cfg.op.name() + " is canceling, the image intersection is {0}");
    w = inter.basis.col(0);
  }
  const SpectralOperator sop(cfg.op);
  const auto fields = rhoKw_family(sop, w, cfg.eps, cfg.N, cfg.length);

  auto rows = detail::run_ordered(fields.size(), cfg.threads, [&](std::size_t i) {
    const RatioSample rs = sobolev_ratio(sop, fields[i], cfg.target, cfg.j, p, cfg.q);
    return RatioRow{cfg.N, eps_label(cfg.eps[i]), rs.numerator, rs.denominator, rs.numerator / rs.denominator};
  });

  RatioTable t;
  t.experiment = cfg.target == Target::hardy ? "hardy-blowup" : "blowup";
  t.operator_name = cfg.op.name();
  t.target = target_name(cfg.target);
  t.rows = std::move(rows);
  summarize_blowup(t, cfg.growth_threshold);
  return t;
}

/// Weighted ratio study. Canceling operators run on the bump family over
/// cfg.sizes; non-canceling ones on the rho K w family at the finest size.
inline RatioTable hardy_experiment(const ExperimentConfig& cfg, const std::vector<double>& eps = {0.25, 0.125, 0.0625},
                                   int blowup_N = 128) {
  ExperimentConfig c = cfg;
  c.target = Target::hardy;
  c.validate();
  if (is_canceling(c.op)) return sobolev_ratio_experiment(c);
  BlowupConfig b(c.op);
  b.j = c.j;
  b.q = c.q;
  b.eps = eps;
  b.N = blowup_N;
  b.target = Target::hardy;
  b.threads = c.threads;
  return blowup_experiment(b);
}

// ---------------------------------------------------------------------------
// L^inf sphere condition

struct LInftyConditionReport {
  Eigen::MatrixXd basis;
  std::vector<MultiIndex> betas;
  /// integrals[i][b] = integral of B^+(xi) w_i xi^beta_b over the sphere, in V.
  std::vector<std::vector<Eigen::VectorXd>> integrals;
  double max_entry = 0.0;
  double scale = 0.0;
  double tolerance = 0.0;
  std::string rule;
  int nodes = 0;
  bool pass = true;
};

struct SphereRule {
  SpherePoints points;
  std::vector<double> weights;
  std::string name;
};

inline SphereRule sphere_rule(int n, int size = 0, std::uint64_t seed = kDefaultSeed) {
  SphereRule rule;
  if (n == 1) {
    rule.points = {Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, -1.0)};
    rule.weights = {1.0, 1.0};
    rule.name = "two-point";
  } else if (n == 2) {
    const int m = size > 0 ? size : 2048;
    for (int i = 0; i < m; ++i) {
      const double t = 2.0 * std::numbers::pi * i / m;
      Eigen::VectorXd x(2);
      x << std::cos(t), std::sin(t);
      rule.points.push_back(x);
      rule.weights.push_back(2.0 * std::numbers::pi / m);
    }
    rule.name = "trapezoid";
  } else if (n == 3) {
    // Antipodal pairs make every odd moment vanish exactly.
    const int half = (size > 0 ? size : 20000) / 2;
    for (auto& x : sphere_points(3, half, seed)) {
      rule.points.push_back(x);
      rule.points.push_back(-x);
    }
    rule.weights.assign(rule.points.size(), 4.0 * std::numbers::pi / static_cast<double>(rule.points.size()));
    rule.name = "fibonacci";
  } else {
    const int half = (size > 0 ? size : 200000) / 2;
    for (auto& x : random_sphere_points(n, half, seed)) {
      rule.points.push_back(x);
      rule.points.push_back(-x);
    }
    rule.weights.assign(rule.points.size(), sphere_area(n) / static_cast<double>(rule.points.size()));
    rule.name = "antithetic monte carlo";
  }
  return rule;
}

inline LInftyConditionReport linfty_condition(const Operator& op, int quadrature_size = 0, double tol = 1e-6,
                                              std::uint64_t seed = kDefaultSeed) {
  const int n = op.n();
  const int k = op.k();
  if (k < n) throw Error("the L^inf condition needs k >= n, got k=" + std::to_string(k) + ", n=" + std::to_string(n));
  const RankReport rank = require_constant_rank(op);
  LInftyConditionReport rep;
  rep.tolerance = tol;
  rep.betas = enumerate_multiindices(n, k - n);
  const SubspaceReport inter = image_intersection(op);
  rep.basis = inter.basis;
  const SphereRule rule = sphere_rule(n, quadrature_size, seed);
  rep.rule = rule.name;
  rep.nodes = static_cast<int>(rule.points.size());

  if (rank.r == 0 || inter.dimension == 0) return rep;
  const NumericMatPoly q(symbolic_pseudoinverse(op.symbol(), rank.r).numerator);
  const NumericMatPoly p(symbolic_pseudoinverse(op.symbol(), rank.r).denominator);

  rep.integrals.assign(static_cast<std::size_t>(inter.dimension),
                       std::vector<Eigen::VectorXd>(rep.betas.size(), Eigen::VectorXd::Zero(op.dim_v())));
  Eigen::MatrixXd qv(op.dim_v(), op.dim_w());
  Eigen::MatrixXd pv(1, 1);
  for (std::size_t t = 0; t < rule.points.size(); ++t) {
    const Eigen::VectorXd& xi = rule.points[t];
    q.evaluate_into(xi.data(), qv);
    p.evaluate_into(xi.data(), pv);
    const Eigen::MatrixXd bplus = qv / pv(0, 0);
    rep.scale = std::max(rep.scale, bplus.norm());
    const Eigen::MatrixXd bw = bplus * inter.basis;
    for (std::size_t b = 0; b < rep.betas.size(); ++b) {
      double mono = rule.weights[t];
      for (int a = 0; a < n; ++a) mono *= std::pow(xi(a), rep.betas[b].entries[static_cast<std::size_t>(a)]);
      for (int i = 0; i < inter.dimension; ++i) rep.integrals[static_cast<std::size_t>(i)][b] += mono * bw.col(i);
    }
  }
  for (const auto& per_w : rep.integrals)
    for (const auto& v : per_w) rep.max_entry = std::max(rep.max_entry, v.cwiseAbs().maxCoeff());
  rep.pass = rep.max_entry <= tol * std::max(rep.scale, std::numeric_limits<double>::min());
  return rep;
}

// ---------------------------------------------------------------------------
// Potential-operator counterexample

struct PotentialDemoReport {
  std::string operator_name;
  int potential_order = 0;
  /// ||B(D) u||_1 for u = potential(D) psi.
  double annihilated_l1 = 0.0;
  /// ||D^{k-1} u||_{n/(n-1)}.
  double sobolev_lhs = 0.0;
  /// ||D^k u||_1, the natural scale of both quantities.
  double scale = 0.0;
  bool pass = false;
};

inline PotentialDemoReport potential_failure_demo(const Operator& op, const Field& psi) {
  if (op.n() < 2) throw Error("the potential demo needs n >= 2");
  if (psi.channels() != op.dim_v()) throw ShapeMismatch("psi must have dim V channels");
  const ConstructedOperator pot = potential_operator(op);
  if (pot.trivial) throw Error(op.name() + " is elliptic: the potential operator vanishes and the demo is vacuous");
  const Field u = apply_operator(pot.op, psi);
  PotentialDemoReport rep;
  rep.operator_name = op.name();
  rep.potential_order = pot.op.k();
  rep.annihilated_l1 = lp_norm(apply_operator(op, u), 1.0);
  const double p = static_cast<double>(op.n()) / static_cast<double>(op.n() - 1);
  rep.sobolev_lhs = lp_norm(apply_full_derivative(op.k() - 1, u), p);
  rep.scale = lp_norm(apply_full_derivative(op.k(), u), 1.0);
  rep.pass = rep.annihilated_l1 <= 1e-9 * rep.scale && rep.sobolev_lhs > 0.01 * rep.scale;
  return rep;
}

/// First member of the bump family, with dim V channels, on an N-grid.
inline Field default_potential_field(const Operator& op, int N, std::uint64_t seed = kDefaultSeed) {
  FamilySpec fam;
  fam.count = 1;
  return sample_bump(bump_family(op.n(), op.dim_v(), fam, seed).front(), Grid(op.n(), N));
}

// ---------------------------------------------------------------------------
// Output

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_ratio_csv(std::ostream& out, const RatioTable& t) {
  out << "N,field_id,numerator,denominator,ratio\n";
  for (const auto& r : t.rows)
    out << r.N << "," << r.field_id << "," << fmt17(r.numerator) << "," << fmt17(r.denominator) << "," << fmt17(r.ratio)
        << "\n";
}

inline void write_ratio_summary(std::ostream& out, const RatioTable& t) {
  const RatioSummary& s = t.summary;
  const bool blowup = t.experiment.find("blowup") != std::string::npos;
  out << "experiment: " << t.experiment << " (" << t.operator_name << ", target " << t.target << ")\n";
  for (const auto& n : t.notices) out << "note: " << n << "\n";
  for (const auto& [label, v] : s.series) out << (blowup ? "" : "N=") << label << "  ratio " << fmt17(v) << "\n";
  if (blowup) {
    out << "growth " << fmt17(s.growth) << " (calibration threshold " << s.threshold << "), ratio monotone: "
        << (s.monotone ? "yes" : "no") << ", numerator monotone: " << (s.numerator_monotone ? "yes" : "no")
        << ", denominator spread " << fmt17(s.denominator_spread) << "\n";
  } else {
    out << "variation " << fmt17(s.variation) << " (calibration threshold " << s.threshold << "), slope vs log N "
        << fmt17(s.slope) << "\n";
  }
  out << s.verdict << "\n";
}

inline void write_linfty_csv(std::ostream& out, const LInftyConditionReport& rep) {
  out << "basis,beta,component,value\n";
  for (std::size_t i = 0; i < rep.integrals.size(); ++i)
    for (std::size_t b = 0; b < rep.betas.size(); ++b) {
      std::string beta;
      for (int e : rep.betas[b].entries) beta += (beta.empty() ? "" : " ") + std::to_string(e);
      for (Eigen::Index c = 0; c < rep.integrals[i][b].size(); ++c)
        out << i << "," << beta << "," << c << "," << fmt17(rep.integrals[i][b](c)) << "\n";
    }
}

inline void write_linfty_summary(std::ostream& out, const LInftyConditionReport& rep) {
  out << "intersection dim " << rep.basis.cols() << ", quadrature " << rep.rule << " (" << rep.nodes << " nodes)\n";
  out << "max |integral| " << fmt17(rep.max_entry) << ", scale " << fmt17(rep.scale) << ", tolerance "
      << rep.tolerance << " x scale\n";
  out << (rep.pass ? "CONDITION PASS" : "CONDITION FAIL") << "\n";
}

inline void write_potential_csv(std::ostream& out, const PotentialDemoReport& rep) {
  out << "quantity,value\n";
  out << "annihilated_l1," << fmt17(rep.annihilated_l1) << "\n";
  out << "sobolev_lhs," << fmt17(rep.sobolev_lhs) << "\n";
  out << "scale," << fmt17(rep.scale) << "\n";
}

inline void write_potential_summary(std::ostream& out, const PotentialDemoReport& rep) {
  out << "potential operator of order " << rep.potential_order << " for " << rep.operator_name << "\n";
  out << "||B(D)u||_1 = " << fmt17(rep.annihilated_l1) << ", ||D^{k-1}u||_{n/(n-1)} = " << fmt17(rep.sobolev_lhs)
      << ", scale ||D^k u||_1 = " << fmt17(rep.scale) << "\n";
  out << (rep.pass ? "ESTIMATE FAILS WITHOUT PROJECTION" : "DEMO INCONCLUSIVE") << "\n";
}

}  // namespace crk
