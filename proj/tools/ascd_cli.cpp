#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ascd/eso.hpp"
#include "ascd/faceoff.hpp"
#include "ascd/harness.hpp"
#include "ascd/libsvm.hpp"
#include "ascd/synthetic.hpp"

namespace {

using ascd::json;
namespace fs = std::filesystem;

// Output convention: one line of compact JSON, then human-readable lines starting with '#'.
void emit(const json& j, const std::vector<std::string>& human, bool quiet) {
  std::cout << j.dump() << '\n';
  if (!quiet)
    for (const auto& h : human) std::cout << "# " << h << '\n';
}

std::string fmt(double v) { return ascd::format_double(v); }

int cmd_run(const std::string& config, const std::string& out, bool measured_wall, bool quiet) {
  auto cfg = ascd::load_config_file(config);
  if (!out.empty()) cfg.output = ascd::resolve_output(out);
  const auto res = ascd::run_experiment(cfg, true, measured_wall);
  json seeds = json::array();
  std::vector<std::string> human;
  for (const auto& s : res.seeds) {
    seeds.push_back({{"seed", s.seed},
                     {"rows", s.rows},
                     {"status", s.status},
                     {"epochs_to_target", s.epochs_to_target ? json(*s.epochs_to_target) : json("censored")},
                     {"trace", s.trace_path.string()}});
    human.push_back("seed " + std::to_string(s.seed) + ": " + s.status + ", epochs to target " +
                    (s.epochs_to_target ? fmt(*s.epochs_to_target) : std::string("censored")));
  }
  emit({{"config_hash", res.config_hash},
        {"output", cfg.output.string()},
        {"seeds", seeds},
        {"mean_epochs_to_target", res.mean_epochs ? json(*res.mean_epochs) : json("censored")},
        {"std_epochs_to_target", res.std_epochs ? json(*res.std_epochs) : json("censored")}},
       human, quiet);
  return 0;
}

int cmd_faceoff(const std::string& data, std::optional<double> lambda, double gamma, const std::string& sampling,
                bool quiet) {
  const auto ds = ascd::read_libsvm_file(data);
  const double lam = lambda ? *lambda : 1.0 / static_cast<double>(ds.n());
  ascd::SerialKind kind;
  if (sampling == "importance") kind = ascd::SerialKind::importance;
  else if (sampling == "uniform") kind = ascd::SerialKind::uniform;
  else throw ascd::InvalidArgument("sampling must be 'uniform' or 'importance'");
  const auto r = ascd::total_complexities(ds.X, lam, gamma, kind);
  emit({{"d", ds.d()},
        {"n", ds.n()},
        {"nnz", ds.X.nnz()},
        {"lambda", lam},
        {"gamma", gamma},
        {"sampling", ascd::to_string(r.sampling)},
        {"C_P", r.C_P},
        {"C_D", r.C_D},
        {"W_P", r.W_P},
        {"W_D", r.W_D},
        {"K_P", r.K_P},
        {"K_D", r.K_D},
        {"T_P", r.T_P},
        {"T_D", r.T_D},
        {"ratio", r.ratio},
        {"recommended", ascd::to_string(r.recommended)}},
       {"T_P / T_D = " + fmt(r.ratio), "recommended: " + ascd::to_string(r.recommended)}, quiet);
  return 0;
}

int cmd_eso_check(const std::string& data, const std::string& rule, const std::string& probs, std::size_t tau,
                  std::size_t trials, std::size_t h_draws, std::uint64_t seed, double lambda_scale, bool quiet) {
  ascd::Problem p(ascd::read_libsvm_file(data), ascd::Loss::quadratic(), ascd::Regularizer::l2(), 1.0);
  p.lambda = lambda_scale / static_cast<double>(p.n());
  ascd::Rng rng(seed);
  const auto s = ascd::build_sampling(json{{"rule", rule}, {"probs", probs}, {"tau", tau}}, p, false, rng);
  const auto v = ascd::eso_v(p.X(), s);
  ascd::Rng mc = rng.split("mc");
  const auto rep = ascd::eso_mc_check(p.X(), s, v, trials, h_draws, mc);
  emit({{"sampling", ascd::to_string(s.rule)},
        {"tau", s.tau},
        {"trials", rep.trials},
        {"h_draws", rep.h_draws},
        {"max_z", rep.max_z},
        {"max_ratio", rep.max_ratio},
        {"passed", rep.passed()}},
       {"max z = " + fmt(rep.max_z) + (rep.passed() ? " (pass)" : " (FAIL)")}, quiet);
  return 0;
}

int cmd_bounds(std::int64_t d, std::int64_t n, std::int64_t alpha, bool quiet) {
  const auto r = ascd::check_regime_theorems(d, n, alpha);
  const auto& b = r.bounds;
  emit({{"d", d},
        {"n", n},
        {"alpha", alpha},
        {"L_alpha_n", b.L_n},
        {"L_alpha_d", b.L_d},
        {"U_alpha_n_d", b.U_nd},
        {"U_alpha_d_n", b.U_dn},
        {"R_alpha_d_n", b.R_dn},
        {"R_alpha_n_d", b.R_nd},
        {"primal_can_win", r.primal_can_win},
        {"dual_can_win", r.dual_can_win},
        {"primal_never_worse", r.primal_never_worse},
        {"dual_never_worse", r.dual_never_worse},
        {"primal_always_shape", r.primal_always_shape},
        {"dual_always_shape", r.dual_always_shape}},
       {"min C_D = " + std::to_string(b.L_n) + ", max C_D = " + std::to_string(b.U_nd),
        "min C_P = " + std::to_string(b.L_d) + ", max C_P = " + std::to_string(b.U_dn),
        "C_P/C_D <= " + fmt(b.R_dn) + ", C_D/C_P <= " + fmt(b.R_nd)},
       quiet);
  return 0;
}

int cmd_gen_synthetic(const std::string& spec_path, const std::string& out, bool quiet) {
  std::ifstream in(spec_path);
  if (!in) throw ascd::Error("cannot open spec " + spec_path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ascd::InvalidArgument(std::string("spec is not valid JSON: ") + e.what());
  }
  const auto spec = ascd::parse_synthetic(j.contains("synthetic") ? j.at("synthetic") : j);
  const auto ds = ascd::generate_synthetic(spec);
  std::ostringstream os;
  ascd::write_libsvm(os, ds);
  ascd::write_atomic(out, os.str());
  emit({{"output", out}, {"n", ds.n()}, {"d", ds.d()}, {"nnz", ds.X.nnz()}, {"spec", ascd::synthetic_to_json(spec)}},
       {"wrote " + std::to_string(ds.n()) + " examples to " + out}, quiet);
  return 0;
}

int cmd_compare(const std::string& glob_a, const std::string& glob_b, double target, bool quiet) {
  const auto fa = ascd::expand_glob(glob_a);
  const auto fb = ascd::expand_glob(glob_b);
  if (fa.empty()) throw ascd::InvalidArgument("no traces match " + glob_a);
  if (fb.empty()) throw ascd::InvalidArgument("no traces match " + glob_b);
  const auto r = ascd::compare_runs(ascd::load_traces(fa), ascd::load_traces(fb), target);
  std::vector<std::string> human;
  human.push_back("pairs: " + std::to_string(r.pairs.size()) + ", censored: " + std::to_string(r.censored));
  human.push_back("mean pass ratio A/B: " + (r.mean ? fmt(*r.mean) : std::string("censored")));
  if (r.theoretical) human.push_back("theoretical ratio: " + fmt(*r.theoretical));
  emit(ascd::compare_to_json(r), human, quiet);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coordinate descent and ascent experiments"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Print only the JSON line");

  std::string config, out;
  bool measured_wall = false;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config, "JSON config file")->required();
  run->add_option("--out", out, "Output directory (overrides the config)");
  run->add_flag("--measured-wall", measured_wall, "Write measured wall time into the CSV");

  std::string data, sampling = "importance";
  std::optional<double> lambda;
  double gamma = 4.0;
  auto* face = app.add_subcommand("faceoff", "Primal versus dual complexity report");
  face->add_option("data", data, "LIBSVM file")->required();
  face->add_option("--lambda", lambda, "Regularization (default 1/n)");
  face->add_option("--gamma", gamma, "Loss smoothness constant");
  face->add_option("--sampling", sampling, "uniform or importance");

  std::string rule = "tau_nice", probs = "uniform";
  std::size_t tau = 2, trials = 10000, h_draws = 50;
  std::uint64_t seed = 1;
  double lambda_scale = 1.0;
  auto* eso = app.add_subcommand("eso-check", "Monte Carlo ESO check");
  eso->add_option("data", data, "LIBSVM file")->required();
  eso->add_option("--sampling", rule, "serial, tau_nice, bucket or chunked");
  eso->add_option("--probs", probs, "uniform, importance or alternating");
  eso->add_option("--tau", tau, "Minibatch size");
  eso->add_option("--trials", trials, "Sampled sets per h");
  eso->add_option("--h-draws", h_draws, "Random directions h");
  eso->add_option("--seed", seed, "Seed");
  eso->add_option("--lambda-scale", lambda_scale, "lambda = scale / n for importance probabilities");

  std::int64_t d = 0, n = 0, alpha = 0;
  auto* bounds = app.add_subcommand("bounds", "Binary matrix C_P / C_D bounds");
  bounds->add_option("--d", d, "Rows")->required();
  bounds->add_option("--n", n, "Columns")->required();
  bounds->add_option("--alpha", alpha, "Number of nonzeros")->required();

  std::string spec, out_path;
  auto* gen = app.add_subcommand("gen-synthetic", "Write a synthetic dataset in LIBSVM format");
  gen->add_option("spec", spec, "JSON synthetic spec")->required();
  gen->add_option("-o,--output", out_path, "Output LIBSVM path")->required();

  std::string glob_a, glob_b;
  double target = 0.0;
  auto* cmp = app.add_subcommand("compare", "Compare two sets of traces");
  cmp->add_option("a", glob_a, "Glob for set A")->required();
  cmp->add_option("b", glob_b, "Glob for set B")->required();
  cmp->add_option("--target", target, "Gap target")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (*run) return cmd_run(config, out, measured_wall, quiet);
    if (*face) return cmd_faceoff(data, lambda, gamma, sampling, quiet);
    if (*eso) return cmd_eso_check(data, rule, probs, tau, trials, h_draws, seed, lambda_scale, quiet);
    if (*bounds) return cmd_bounds(d, n, alpha, quiet);
    if (*gen) return cmd_gen_synthetic(spec, out_path, quiet);
    if (*cmp) return cmd_compare(glob_a, glob_b, target, quiet);
  } catch (const ascd::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
