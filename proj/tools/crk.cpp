// crk: analyze constant-rank operators, build annihilators, run the inequality probes.
//
// Exit codes: 0 success (mathematical verdicts are data), 1 parse or
// configuration error, 2 non-constant rank.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "crk/annihilator.hpp"
#include "crk/harness.hpp"
#include "crk/operator.hpp"
#include "crk/operator_io.hpp"
#include "crk/rank.hpp"

namespace {

struct OperatorFlags {
  std::string builtin;
  std::string file;
  int n = 3;

  crk::Operator load() const {
    if (builtin.empty() == file.empty()) throw crk::Error("give exactly one of --builtin or --file");
    return file.empty() ? crk::builtin(builtin, n) : crk::load_operator(file);
  }
};

void add_operator_flags(CLI::App* cmd, OperatorFlags& f) {
  cmd->add_option("--builtin", f.builtin, "builtin operator name")
      ->check(CLI::IsMember(crk::builtin_names()));
  cmd->add_option("--file", f.file, "operator JSON file");
  cmd->add_option("--n", f.n, "space dimension for builtins")->check(CLI::Range(1, 8));
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.empty()) throw crk::Error("bad integer list entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<double> parse_eps_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto r = crk::parse_rational(item);
    if (!r || *r <= 0) throw crk::Error("bad epsilon entry '" + item + "'");
    out.push_back(r->get_d());
  }
  return out;
}

void print_sampling_note(int samples, double tol) {
  std::cout << "note: rank and intersections are sampled at " << samples << " sphere points (tol " << tol
            << "); they are numerical evidence, not symbolic certificates\n";
}

int cmd_analyze(const OperatorFlags& flags, double tol) {
  const crk::Operator op = flags.load();
  std::cout << "operator " << op.name() << ": n=" << op.n() << ", k=" << op.k() << ", dim V=" << op.dim_v()
            << ", dim W=" << op.dim_w() << "\n";
  const int n_samples = crk::default_sample_count(op.n());
  const crk::RankReport rep = crk::rank_profile(op, n_samples, tol);
  std::cout << "rank profile: min " << rep.min_rank << ", max " << rep.max_rank << " over " << rep.sample_count
            << " sphere samples\n";
  if (!rep.constant_rank) {
    std::cout << "non-constant rank (witness ξ=" << crk::format_point(rep.min_witness) << ")\n";
    std::cout << "rank " << rep.min_rank << " at ξ=" << crk::format_point(rep.min_witness) << ", rank "
              << rep.max_rank << " at ξ=" << crk::format_point(rep.max_witness) << "\n";
    print_sampling_note(rep.sample_count, tol);
    return 2;
  }
  const crk::SubspaceReport inter = crk::image_intersection(op, n_samples, tol);
  std::cout << "constant rank r=" << rep.r << ", elliptic: " << yes_no(rep.elliptic)
            << ", canceling: " << yes_no(inter.dimension == 0) << " (intersection dim " << inter.dimension << ")\n";
  if (rep.r > 0) {
    const crk::ConstructedOperator ann = crk::exact_annihilator(op);
    const crk::SubspaceReport ker = crk::kernel_intersection(ann.op, n_samples, tol);
    std::cout << "annihilator order " << ann.op.k() << (ann.trivial ? " (identically zero)" : "")
              << ", cocanceling: " << yes_no(ker.dimension == 0) << " (kernel intersection dim " << ker.dimension
              << ")\n";
  }
  print_sampling_note(rep.sample_count, tol);
  return 0;
}

int cmd_annihilate(const OperatorFlags& flags, const std::string& out, const std::string& potential_out) {
  const crk::Operator op = flags.load();
  const crk::ConstructedOperator ann = crk::exact_annihilator(op);
  std::cout << "annihilator of " << op.name() << ": order 2kr = " << ann.op.k() << " (k=" << op.k()
            << ", r=" << ann.source_rank << "), maps R^" << ann.op.dim_v() << " -> R^" << ann.op.dim_w() << "\n";
  if (ann.trivial) std::cout << "annihilator is identically zero: the symbol is onto for every ξ\n";
  const crk::ExactnessReport ex = crk::verify_exactness(op, ann.op);
  char angle[32];
  std::snprintf(angle, sizeof angle, "%.3g", ex.max_angle);
  std::cout << "exactness: " << (ex.pass ? "pass" : "FAIL") << " (A B = 0 exactly: " << yes_no(ex.exact_product_zero)
            << ", dim ker A = dim im B = " << ex.dim_im << ": " << yes_no(ex.dims_match) << ", max principal angle "
            << angle << " over " << ex.sample_count << " samples)\n";
  if (out.empty())
    std::cout << crk::serialize_operator(ann.op);
  else
    crk::save_operator(ann.op, out);
  if (!potential_out.empty()) {
    const crk::ConstructedOperator pot = crk::potential_operator(op);
    crk::save_operator(pot.op, potential_out);
    std::cout << "potential operator of order " << pot.op.k() << " written to " << potential_out
              << (pot.trivial ? " (identically zero: elliptic input)" : "") << "\n";
  }
  return 0;
}

struct VerifyFlags {
  std::string experiment = "sobolev";
  int j = 1;
  std::optional<double> q;
  std::string sizes;
  std::string eps = "1/4,1/8,1/16";
  std::uint64_t seed = crk::kDefaultSeed;
  std::string out;
  double tol = 1e-6;
};

void write_csv(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw crk::Error("cannot open " + path + " for writing");
  f << text;
}

int cmd_verify(const OperatorFlags& flags, const VerifyFlags& v) {
  const crk::Operator op = flags.load();
  const std::vector<int> sizes = v.sizes.empty() ? std::vector<int>{} : parse_int_list(v.sizes);
  std::ostringstream csv;
  const std::string& e = v.experiment;

  if (e == "sobolev" || e == "lorentz" || e == "hardy") {
    crk::ExperimentConfig cfg(op);
    cfg.j = v.j;
    cfg.seed = v.seed;
    if (!sizes.empty()) cfg.sizes = sizes;
    cfg.target = e == "sobolev" ? crk::Target::lp : e == "lorentz" ? crk::Target::lorentz : crk::Target::hardy;
    cfg.q = v.q.value_or(e == "hardy" ? 1.0 : 2.0);
    const crk::RatioTable t = e == "hardy" ? crk::hardy_experiment(cfg) : crk::sobolev_ratio_experiment(cfg);
    crk::write_ratio_csv(csv, t);
    crk::write_ratio_summary(std::cout, t);
  } else if (e == "blowup") {
    crk::BlowupConfig cfg(op);
    cfg.j = v.j;
    if (v.q) cfg.q = *v.q;
    cfg.eps = parse_eps_list(v.eps);
    if (!sizes.empty()) cfg.N = sizes.back();
    const crk::RatioTable t = crk::blowup_experiment(cfg);
    crk::write_ratio_csv(csv, t);
    crk::write_ratio_summary(std::cout, t);
  } else if (e == "linfty") {
    const crk::LInftyConditionReport rep = crk::linfty_condition(op, sizes.empty() ? 0 : sizes.back(), v.tol, v.seed);
    crk::write_linfty_csv(csv, rep);
    crk::write_linfty_summary(std::cout, rep);
  } else if (e == "potential-demo") {
    const int N = sizes.empty() ? 32 : sizes.back();
    const crk::PotentialDemoReport rep =
        crk::potential_failure_demo(op, crk::default_potential_field(op, N, v.seed));
    crk::write_potential_csv(csv, rep);
    crk::write_potential_summary(std::cout, rep);
  }
  write_csv(v.out, csv.str());
  if (!v.out.empty()) std::cout << "csv written to " << v.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constant-rank operators: symbols, annihilators and L1 estimate probes"};
  app.require_subcommand(1);

  OperatorFlags analyze_op, annihilate_op, verify_op;
  double tol = crk::kDefaultRankTol;
  std::string ann_out, pot_out;
  VerifyFlags vf;

  auto* analyze = app.add_subcommand("analyze", "rank profile, ellipticity and cancellation");
  add_operator_flags(analyze, analyze_op);
  analyze->add_option("--tol", tol, "relative singular value tolerance")->check(CLI::PositiveNumber);

  auto* annihilate = app.add_subcommand("annihilate", "build the exact annihilator and check exactness");
  add_operator_flags(annihilate, annihilate_op);
  annihilate->add_option("--out", ann_out, "write the annihilator here instead of stdout");
  annihilate->add_option("--potential", pot_out, "also write the potential operator here");

  auto* verify = app.add_subcommand("verify", "run a numerical experiment");
  add_operator_flags(verify, verify_op);
  verify->add_option("--experiment", vf.experiment)
      ->check(CLI::IsMember({"sobolev", "lorentz", "hardy", "blowup", "linfty", "potential-demo"}));
  verify->add_option("--j", vf.j, "derivative loss, 1 <= j <= min(k, n-1)");
  verify->add_option("--q", vf.q, "Lorentz or Hardy exponent");
  verify->add_option("--sizes", vf.sizes, "grid sizes, e.g. 16,32,64 (blowup, potential-demo: last entry)");
  verify->add_option("--eps", vf.eps, "mollifier radii for blowup, e.g. 1/4,1/8,1/16");
  verify->add_option("--seed", vf.seed, "test field seed");
  verify->add_option("--out", vf.out, "CSV output path");
  verify->add_option("--tol", vf.tol, "relative tolerance of the L-infinity condition")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(analyze_op, tol);
    if (annihilate->parsed()) return cmd_annihilate(annihilate_op, ann_out, pot_out);
    return cmd_verify(verify_op, vf);
  } catch (const crk::NonConstantRank& e) {
    std::cout << "non-constant rank (witness ξ=" << crk::format_point(Eigen::Map<const Eigen::VectorXd>(
                                                      e.min_witness.data(), static_cast<Eigen::Index>(e.min_witness.size())))
              << ")\n";
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
