// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "crk/annihilator.hpp"
#include "crk/harness.hpp"
#include "crk/operator.hpp"
#include "crk/pseudoinverse.hpp"
#include "crk/rank.hpp"
#include "crk/spectral.hpp"

using namespace crk;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Every constant-rank builtin in dimensions 2 and 3.
std::vector<std::pair<std::string, int>> constant_rank_builtins() {
  std::vector<std::pair<std::string, int>> out;
  for (int n : {2, 3})
    for (const char* name : {"gradient", "divergence", "curl3", "laplacian", "symmetric_gradient"}) {
      if (std::string(name) == "curl3" && n != 3) continue;
      out.emplace_back(name, n);
    }
  return out;
}

Outcome pseudoinverse_correctness() {
  double max_err = 0.0, max_penrose = 0.0;
  for (const auto& [name, n] : constant_rank_builtins()) {
    const Operator op = builtin(name, n);
    const int r = rank_profile(op).r;
    const RationalMatSymbol mp = symbolic_pseudoinverse(op.symbol(), r);
    for (const auto& xi : random_sphere_points(n, 100, kDefaultSeed + 7)) {
      const Eigen::MatrixXd b = op.symbol()(xi);
      const Eigen::MatrixXd x = mp(xi);
      max_err = std::max(max_err, (x - mp_numeric(b)).cwiseAbs().maxCoeff());
      const double p1 = (b * x * b - b).cwiseAbs().maxCoeff();
      const double p2 = (x * b * x - x).cwiseAbs().maxCoeff();
      const double p3 = ((b * x).transpose() - b * x).cwiseAbs().maxCoeff();
      const double p4 = ((x * b).transpose() - x * b).cwiseAbs().maxCoeff();
      max_penrose = std::max({max_penrose, p1, p2, p3, p4});
    }
  }
  return {max_err <= 1e-8 && max_penrose <= 1e-9,
          "max |Q/p - svd| " + fmt("%.2e", max_err) + ", max Penrose residual " + fmt("%.2e", max_penrose)};
}

Outcome annihilator_exactness() {
  bool ok = true;
  double worst = 0.0;
  std::string bad;
  for (const auto& [name, n] : constant_rank_builtins()) {
    const Operator op = builtin(name, n);
    const ConstructedOperator ann = exact_annihilator(op);
    const ExactnessReport ex = verify_exactness(op, ann.op, 100);
    worst = std::max(worst, ex.max_angle);
    const bool canceling = is_canceling(op);
    const bool cocanceling = kernel_intersection(ann.op, default_sample_count(n)).dimension == 0;
    if (!ex.pass || canceling != cocanceling) {
      ok = false;
      bad += " " + name + std::to_string(n);
    }
  }
  return {ok, "max principal angle " + fmt("%.2e", worst) + (bad.empty() ? "" : ", failing:" + bad)};
}

Outcome classification() {
  auto profile = [](const std::string& name, int n) { return rank_profile(builtin(name, n), 500); };
  auto canceling = [](const std::string& name, int n) {
    return image_intersection(builtin(name, n), 500).dimension == 0;
  };
  bool ok = profile("curl3", 3).constant_rank && canceling("curl3", 3);
  for (int n : {2, 3}) {
    ok = ok && !canceling("divergence", n) && !canceling("laplacian", n);
    const Operator grad = builtin("gradient", n);
    const RankReport g = profile("gradient", n);
    const RationalMatSymbol mp = symbolic_pseudoinverse(grad.symbol(), g.r);
    ok = ok && g.constant_rank && g.elliptic && projector_symbols(grad.symbol(), mp).kernel.numerator.is_zero();
  }
  return {ok, "curl3 canceling, divergence and laplacian non-canceling, gradient elliptic with zero projection"};
}

Outcome reconstruction() {
  double worst = 0.0;
  for (const auto& [name, n] : constant_rank_builtins()) {
    const SpectralOperator sop(builtin(name, n));
    const Grid grid(n, 32);
    for (const BumpSpec& b : bump_family(n, sop.op().dim_v(), {}, kDefaultSeed)) {
      const Field u = sample_bump(b, grid);
      const Field defect = (u - sop.pi(u)) - sop.kernel(sop.apply(u));
      worst = std::max(worst, lp_norm(defect, 2.0) / lp_norm(u, 2.0));
    }
  }
  return {worst <= 1e-9, "max relative defect " + fmt("%.2e", worst)};
}

Outcome helmholtz() {
  const SpectralOperator curl(builtin("curl3", 3));
  const Operator div = builtin("divergence", 3);
  const Grid grid(3, 32);
  double worst = 0.0;
  for (const BumpSpec& b : bump_family(3, 3, {}, kDefaultSeed)) {
    const Field u = sample_bump(b, grid);
    const Field pu = curl.pi(u);
    const double scale = lp_norm(apply_full_derivative(1, u), 2.0);
    worst = std::max({worst, lp_norm(apply_operator(div, u - pu), 2.0) / scale,
                      lp_norm(curl.apply(pu), 2.0) / scale});
  }
  return {worst <= 1e-9, "max relative residual " + fmt("%.2e", worst)};
}

Outcome inequality_probes() {
  ExperimentConfig sob(builtin("curl3", 3));
  sob.j = 1;
  sob.sizes = {16, 32, 64};
  const RatioTable s = sobolev_ratio_experiment(sob);

  ExperimentConfig hardy(builtin("curl3", 3));
  hardy.j = 1;
  hardy.q = 1.0;
  hardy.sizes = {16, 32, 64};
  const RatioTable h = hardy_experiment(hardy);

  std::string detail = "curl3 sobolev variation " + fmt("%.3f", s.summary.variation) + ", hardy variation " +
                       fmt("%.3f", h.summary.variation);
  bool ok = sob.p() == 1.5 && s.summary.variation < 2.0 && h.summary.variation < 2.0 &&
            s.summary.verdict == "BOUNDED" && h.summary.verdict == "BOUNDED";
  for (const char* name : {"divergence", "laplacian"}) {
    BlowupConfig cfg(builtin(name, 2));
    cfg.eps = {0.25, 0.125, 0.0625};
    cfg.N = 128;
    const RatioTable t = blowup_experiment(cfg);
    detail += std::string(", ") + name + " growth " + fmt("%.3f", t.summary.growth);
    ok = ok && t.summary.growth >= 1.25 && t.summary.verdict == "DIVERGENT";
  }
  return {ok, detail};
}

Outcome linfty() {
  const LInftyConditionReport d = linfty_condition(builtin("partial1", 1));
  bool ok = d.pass && d.rule == "two-point";
  for (const auto& per_basis : d.integrals)
    for (const auto& v : per_basis) ok = ok && v.cwiseAbs().maxCoeff() == 0.0;

  const LInftyConditionReport lap = linfty_condition(builtin("laplacian", 2));
  const double twopi = 2.0 * std::numbers::pi;
  const double rel = std::abs(std::abs(lap.integrals.at(0).at(0)(0)) - twopi) / twopi;
  ok = ok && !lap.pass && rel <= 1e-6;
  return {ok, "n=1 two-point sum exactly zero, laplacian2 relative quadrature error " + fmt("%.2e", rel)};
}

Outcome potential_demo() {
  bool ok = true;
  std::string detail;
  for (const auto& [name, n] : {std::pair<std::string, int>{"curl3", 3}, {"divergence", 2}}) {
    const Operator op = builtin(name, n);
    const PotentialDemoReport rep = potential_failure_demo(op, default_potential_field(op, 32));
    ok = ok && rep.annihilated_l1 <= 1e-9 * rep.scale && rep.sobolev_lhs > 0.01 * rep.scale;
    detail += (detail.empty() ? "" : ", ") + name + " annihilated/scale " +
              fmt("%.2e", rep.annihilated_l1 / rep.scale) + " lhs/scale " + fmt("%.3f", rep.sobolev_lhs / rep.scale);
  }
  return {ok, detail};
}

Outcome determinism() {
  auto ratio_csv = [](int threads) {
    ExperimentConfig cfg(builtin("divergence", 2));
    cfg.target = Target::lorentz;
    cfg.q = 1.5;
    cfg.sizes = {16, 32};
    cfg.threads = threads;
    std::ostringstream os;
    write_ratio_csv(os, sobolev_ratio_experiment(cfg));
    return os.str();
  };
  auto blowup_csv = [] {
    BlowupConfig cfg(builtin("divergence", 2));
    cfg.N = 64;
    cfg.eps = {0.25, 0.125};
    std::ostringstream os;
    write_ratio_csv(os, blowup_experiment(cfg));
    return os.str();
  };
  auto linfty_csv = [] {
    std::ostringstream os;
    write_linfty_csv(os, linfty_condition(builtin("laplacian", 2)));
    return os.str();
  };
  auto potential_csv = [] {
    const Operator op = builtin("divergence", 2);
    std::ostringstream os;
    write_potential_csv(os, potential_failure_demo(op, default_potential_field(op, 32)));
    return os.str();
  };
  const bool ok = ratio_csv(1) == ratio_csv(1) && ratio_csv(1) == ratio_csv(4) && blowup_csv() == blowup_csv() &&
                  linfty_csv() == linfty_csv() && potential_csv() == potential_csv();
  return {ok, "ratio, blowup, linfty and potential CSVs compared byte for byte"};
}

}  // namespace

int main() {
  const std::vector<std::tuple<int, std::string, std::function<Outcome()>, double>> criteria{
      {1, "symbolic pseudoinverse", pseudoinverse_correctness, 5.0},
      {2, "annihilator exactness", annihilator_exactness, 5.0},
      {3, "classification", classification, 0.0},
      {4, "reconstruction identity", reconstruction, 30.0},
      {5, "helmholtz decomposition", helmholtz, 0.0},
      {6, "inequality probes", inequality_probes, 180.0},
      {7, "L-infinity condition", linfty, 0.0},
      {8, "potential failure demo", potential_demo, 0.0},
      {9, "determinism", determinism, 0.0},
  };
  int failed = 0;
  for (const auto& [id, name, fn, budget] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget > 0.0 && secs >= budget) {
      o.pass = false;
      o.detail += ", over the " + fmt("%.0f", budget) + " s budget";
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
