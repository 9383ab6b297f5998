#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ascd/block_descent.hpp"
#include "ascd/dual_solvers.hpp"
#include "ascd/error.hpp"
#include "ascd/libsvm.hpp"
#include "ascd/primal_solvers.hpp"
#include "ascd/problem.hpp"
#include "ascd/rng.hpp"
#include "ascd/synthetic.hpp"
#include "ascd/trace.hpp"

namespace ascd {

using json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr const char* kVersion = "ascd 0.1.0";
inline constexpr const char* kTraceHeader =
    "epoch,effective_passes,wall_seconds,simulated_parallel_cost,primal,dual,gap,lambda,theta,potential";

/// FNV-1a of the canonical (key-sorted, compact) dump, as 16 hex digits.
inline std::string config_hash(const json& cfg) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(cfg.dump());
  return os.str();
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config field '") + key + "': " + e.what());
  }
}

inline const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidArgument(std::string("config is missing '") + key + "'");
  return j.at(key);
}

inline Loss parse_loss(const json& pj) {
  const auto name = get_or<std::string>(pj, "loss", "quadratic");
  if (name == "quadratic") return Loss::quadratic();
  if (name == "logistic") return Loss::logistic();
  if (name == "smoothed_hinge") return Loss::smoothed_hinge(get_or<double>(pj, "gamma", 1.0));
  throw InvalidArgument("unknown loss: " + name);
}

inline Regularizer parse_regularizer(const json& pj) {
  const auto name = get_or<std::string>(pj, "regularizer", "l2");
  if (name == "l2") return Regularizer::l2();
  if (name == "l1") return Regularizer::l1();
  if (name == "none") return Regularizer::none();
  if (name == "box") return Regularizer::box(get_or<double>(pj, "box_bound", 1.0));
  throw InvalidArgument("unknown regularizer: " + name);
}

inline NormLaw parse_norm_law(const json& sj) {
  const auto kind = get_or<std::string>(sj, "norm_law", "uniform");
  if (kind == "constant") return NormLaw::constant(get_or<double>(sj, "norm_param", 1.0));
  if (kind == "uniform") return NormLaw::uniform();
  if (kind == "chisq") return NormLaw::chisq(get_or<double>(sj, "norm_param", 1.0));
  if (kind == "extreme") return NormLaw::extreme(get_or<double>(sj, "norm_param", 100.0));
  throw InvalidArgument("unknown norm law: " + kind);
}

inline SyntheticSpec parse_synthetic(const json& sj) {
  SyntheticSpec s;
  s.n = get_or<std::size_t>(sj, "n", 0);
  s.d = get_or<std::size_t>(sj, "d", 0);
  s.sparsity = get_or<double>(sj, "sparsity", 1.0);
  s.norm_law = parse_norm_law(sj);
  s.seed = get_or<std::uint64_t>(sj, "seed", 1);
  if (s.n == 0 || s.d == 0) throw InvalidArgument("synthetic spec needs n >= 1 and d >= 1");
  return s;
}

inline json synthetic_to_json(const SyntheticSpec& s) {
  return json{{"n", s.n},
              {"d", s.d},
              {"sparsity", s.sparsity},
              {"norm_law", to_string(s.norm_law.kind)},
              {"norm_param", s.norm_law.param},
              {"seed", s.seed}};
}

/// Data source: {"libsvm": path} or {"synthetic": {...}}.
inline Dataset load_dataset(const json& dj, const fs::path& base = {}) {
  if (dj.contains("libsvm")) {
    fs::path p = dj.at("libsvm").get<std::string>();
    if (p.is_relative() && !base.empty()) p = base / p;
    return read_libsvm_file(p.string());
  }
  if (dj.contains("synthetic")) return generate_synthetic(parse_synthetic(dj.at("synthetic")));
  throw InvalidArgument("data must give 'libsvm' or 'synthetic'");
}

/// lambda given as a number, "1/n", or "k/n".
inline double parse_lambda(const json& pj, std::size_t n) {
  const json& l = require(pj, "lambda");
  if (l.is_number()) return l.get<double>();
  if (l.is_string()) {
    const auto s = l.get<std::string>();
    const auto slash = s.find("/n");
    if (slash != std::string::npos && slash + 2 == s.size()) {
      const double k = slash == 0 ? 1.0 : std::stod(s.substr(0, slash));
      return k / static_cast<double>(n);
    }
  }
  throw InvalidArgument("lambda must be a number or of the form 'k/n'");
}

struct ExperimentConfig {
  json raw;
  std::string name = "run";
  std::string method;
  std::vector<std::uint64_t> seeds{1};
  fs::path output;
  fs::path base_dir;
};

inline const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> m{"sdca", "quartz", "adasdca", "adasdca_plus", "dfsdca", "nsync", "block_descent"};
  return m;
}

/// Output directory: config "output" (or the name), relative paths resolved against ASCD_OUTPUT_ROOT.
inline fs::path resolve_output(const std::string& out) {
  fs::path p(out);
  if (p.is_absolute()) return p;
  if (const char* root = std::getenv("ASCD_OUTPUT_ROOT"); root && *root) return fs::path(root) / p;
  return p;
}

inline void check_compatibility(const std::string& method, const json& sj) {
  const auto rule = get_or<std::string>(sj, "rule", "serial");
  if (method == "sdca" && rule != "serial") throw InvalidArgument("sdca needs a serial sampling");
  if ((method == "adasdca" || method == "adasdca_plus") && sj.is_object() && sj.contains("rule") && rule != "serial")
    throw InvalidArgument(method + " samples adaptively; a fixed sampling rule cannot be given");
}

inline ExperimentConfig parse_config(const json& raw, const fs::path& base_dir = {}) {
  ExperimentConfig c;
  c.raw = raw;
  c.base_dir = base_dir;
  c.name = get_or<std::string>(raw, "name", "run");
  c.method = require(raw, "method").get<std::string>();
  if (std::find(known_methods().begin(), known_methods().end(), c.method) == known_methods().end())
    throw InvalidArgument("unknown method: " + c.method);
  if (raw.contains("seeds")) {
    c.seeds = raw.at("seeds").get<std::vector<std::uint64_t>>();
    if (c.seeds.empty()) throw InvalidArgument("seeds must be a non-empty list");
  }
  c.output = resolve_output(get_or<std::string>(raw, "output", c.name));
  if (c.method == "block_descent") {
    require(raw, "objective");
  } else {
    require(raw, "problem");
    check_compatibility(c.method, raw.value("sampling", json::object()));
  }
  return c;
}

inline ExperimentConfig load_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  json raw;
  try {
    raw = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(raw, path.parent_path());
}

/// Sampling over `n` units of X (columns, or rows of X when `features`).
inline Sampling build_sampling(const json& sj, const Problem& p, bool features, Rng rng) {
  const SparseMatrix& X = p.X();
  const std::size_t n = features ? p.d() : p.n();
  const auto norms = features ? row_stats(X).norms_sq : col_stats(X).norms_sq;
  const auto nnz = features ? row_stats(X).nnz : col_stats(X).nnz;
  const double nlg = p.nlg();
  const auto rule = get_or<std::string>(sj, "rule", "serial");
  const auto probs = get_or<std::string>(sj, "probs", "uniform");
  const auto tau = get_or<std::size_t>(sj, "tau", 1);
  if (rule == "serial") {
    if (probs == "uniform") return Sampling::uniform_serial(n);
    if (probs == "importance") return Sampling::serial(importance_probs(norms, nlg));
    throw InvalidArgument("serial probs must be 'uniform' or 'importance'");
  }
  if (rule == "tau_nice") return Sampling::tau_nice(n, tau);
  if (rule == "bucket") {
    Rng prng = rng.split("partition");
    Partition B = random_buckets(n, tau, prng);
    const SparseMatrix Xt = features ? X.transpose() : SparseMatrix{};
    const SparseMatrix& Xs = features ? Xt : X;
    std::vector<double> pb;
    if (probs == "uniform") {
      pb.assign(n, 0.0);
      for (const auto& g : B.groups)
        for (auto j : g) pb[j] = 1.0 / static_cast<double>(g.size());
    } else if (probs == "importance") {
      pb = bucket_probs_practical(v_bucket_uniform(Xs, B), nlg, B);
    } else if (probs == "alternating") {
      pb = bucket_probs_alternating(Xs, B, nlg, 1e-10, 100).p;
    } else {
      throw InvalidArgument("bucket probs must be 'uniform', 'importance' or 'alternating'");
    }
    return Sampling::bucket(std::move(B), std::move(pb));
  }
  if (rule == "chunked") return Sampling::chunked(naive_chunks(nnz), tau);
  throw InvalidArgument("unknown sampling rule: " + rule);
}

inline Budget parse_budget(const json& bj) {
  Budget b;
  b.max_epochs = get_or<double>(bj, "max_epochs", 100.0);
  b.target_gap = get_or<double>(bj, "target_gap", 0.0);
  b.checkpoint_every = get_or<double>(bj, "checkpoint_every", 1.0);
  if (!(b.max_epochs > 0.0)) throw InvalidArgument("max_epochs must be positive");
  return b;
}

inline Problem build_problem(const json& pj, const fs::path& base = {}) {
  Dataset ds = load_dataset(require(pj, "data"), base);
  if (get_or<bool>(pj, "normalize", false)) ds = normalize_by_avg_col_norm(ds);
  const double lambda = parse_lambda(pj, ds.n());
  return Problem(std::move(ds), parse_loss(pj), parse_regularizer(pj), lambda);
}

inline BlockRule parse_block_rule(const json& rj) {
  const auto kind = get_or<std::string>(rj, "kind", "serial_uniform");
  const auto tau = get_or<std::size_t>(rj, "tau", 1);
  BlockRule r;
  if (kind == "full_batch") r = BlockRule::full_batch();
  else if (kind == "serial_uniform") r = BlockRule::serial_uniform();
  else if (kind == "serial_importance") r = BlockRule::serial_importance();
  else if (kind == "serial_greedy") r = BlockRule::serial_greedy();
  else if (kind == "tau_nice") r = BlockRule::tau_nice(tau);
  else if (kind == "greedy_minibatch") r = BlockRule::greedy_minibatch(tau);
  else throw InvalidArgument("unknown block rule: " + kind);
  if (rj.is_object() && rj.contains("L")) r.L = rj.at("L").get<double>();
  return r;
}

inline TestObjectiveSpec parse_objective(const json& oj) {
  TestObjectiveSpec s;
  s.kind = parse_test_objective_kind(get_or<std::string>(oj, "kind", "quadratic"));
  s.n = get_or<std::size_t>(oj, "n", 10);
  s.m = get_or<std::size_t>(oj, "m", 100);
  s.lambda = get_or<double>(oj, "lambda", 0.0);
  s.seed = get_or<std::uint64_t>(oj, "seed", 1);
  const auto g = get_or<std::string>(oj, "g", "none");
  if (g == "l1") s.g = Regularizer::l1(get_or<double>(oj, "g_weight", 1.0));
  else if (g == "l2") s.g = Regularizer::l2(get_or<double>(oj, "g_weight", 1.0));
  else if (g != "none") throw InvalidArgument("unknown objective regularizer: " + g);
  return s;
}

/// One run of the configured method with the given seed.
inline Trace run_once(const ExperimentConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  const json& raw = cfg.raw;
  if (cfg.method == "block_descent") {
    const Objective obj = make_test_objective(parse_objective(raw.at("objective")));
    BlockOptions opt;
    const json bj = raw.value("budget", json::object());
    opt.budget.max_iterations = get_or<std::size_t>(bj, "max_iterations", 1000);
    opt.budget.target_xi = get_or<double>(bj, "target_xi", 0.0);
    Rng xr = rng.split("x0");
    const double scale = get_or<double>(raw.at("objective"), "x0_scale", 0.0);
    opt.x0 = Vec::Zero(static_cast<Eigen::Index>(obj.dim));
    for (Eigen::Index i = 0; i < opt.x0.size(); ++i) opt.x0(i) = scale * xr.normal();
    Rng run = rng.split("run");
    auto res = block_descent_run(obj, parse_block_rule(raw.value("rule", json::object())), opt, run);
    res.trace.info["max_lemma_violation"] = std::to_string(res.max_lemma_violation);
    return std::move(res.trace);
  }
  const Problem p = build_problem(raw.at("problem"), cfg.base_dir);
  const Budget budget = parse_budget(raw.value("budget", json::object()));
  const json sj = raw.value("sampling", json::object());
  Rng run = rng.split("run");
  if (cfg.method == "sdca" || cfg.method == "quartz") {
    DualOptions opt;
    opt.budget = budget;
    return quartz_run(p, build_sampling(sj, p, false, rng), opt, run);
  }
  if (cfg.method == "adasdca") {
    DualOptions opt;
    opt.budget = budget;
    return adasdca_run(p, opt, run);
  }
  if (cfg.method == "adasdca_plus") {
    AdaPlusOptions opt;
    opt.base.budget = budget;
    const json aj = raw.value("adasdca_plus", json::object());
    opt.m = get_or<double>(aj, "m", 10.0);
    const auto o = get_or<std::string>(aj, "option", "II");
    if (o != "I" && o != "II") throw InvalidArgument("adasdca_plus option must be 'I' or 'II'");
    opt.option = o == "I" ? AdaPlusOption::I : AdaPlusOption::II;
    return adasdca_plus_run(p, opt, run);
  }
  if (cfg.method == "dfsdca") {
    DfsdcaOptions opt;
    opt.budget = budget;
    return dfsdca_run(p, build_sampling(sj, p, false, rng), opt, run);
  }
  NsyncOptions opt;
  opt.budget = budget;
  return nsync_run(p, build_sampling(sj, p, true, rng), opt, run);
}

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double_cell(const std::string& s) {
  if (s == "nan") return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw InvalidArgument("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw InvalidArgument("bad number '" + s + "'");
  }
}

/// Deterministic stand-in for wall time: one nanosecond per visited nonzero
/// (or per coordinate for block descent).
inline double wall_proxy(const TraceRow& r, double nnz_scale) { return r.effective_passes * nnz_scale * 1e-9; }

inline std::string trace_to_csv(const Trace& t, double nnz_scale, bool measured_wall = false) {
  std::ostringstream os;
  os << kTraceHeader << '\n';
  for (const auto& r : t.rows) {
    const double wall = measured_wall ? r.wall_seconds : wall_proxy(r, nnz_scale);
    os << format_double(r.epoch) << ',' << format_double(r.effective_passes) << ',' << format_double(wall) << ','
       << format_double(r.simulated_parallel_cost) << ',' << format_double(r.primal) << ',' << format_double(r.dual)
       << ',' << format_double(r.gap) << ',' << format_double(r.lambda) << ',' << format_double(r.theta) << ','
       << format_double(r.potential) << '\n';
  }
  return os.str();
}

inline Trace read_trace_csv(std::istream& in, const std::string& source = "trace") {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument(source + ": empty trace file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw InvalidArgument(source + ": unexpected trace header");
  Trace t;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(parse_double_cell(cell));
    if (cells.size() != 10) throw ParseError(lineno, source + ": expected 10 columns");
    TraceRow r;
    r.epoch = cells[0];
    r.effective_passes = cells[1];
    r.wall_seconds = cells[2];
    r.simulated_parallel_cost = cells[3];
    r.primal = cells[4];
    r.dual = cells[5];
    r.gap = cells[6];
    r.lambda = cells[7];
    r.theta = cells[8];
    r.potential = cells[9];
    t.rows.push_back(r);
  }
  return t;
}

inline Trace read_trace_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot open trace " + p.string());
  return read_trace_csv(in, p.string());
}

/// Writes to a sibling temporary then renames.
inline void write_atomic(const fs::path& p, const std::string& content) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, p);
}

inline std::optional<double> epochs_to_target(const Trace& t, double target) {
  if (!(target > 0.0)) return std::nullopt;
  for (const auto& r : t.rows)
    if (!std::isnan(r.gap) && r.gap <= target) return r.epoch;
  return std::nullopt;
}

struct SeedSummary {
  std::uint64_t seed = 0;
  std::size_t rows = 0;
  std::optional<double> epochs_to_target;
  std::string status;
  fs::path trace_path;
};

struct ExperimentResult {
  std::string config_hash;
  std::vector<SeedSummary> seeds;
  std::vector<Trace> traces;
  std::optional<double> mean_epochs, std_epochs;
};

inline double target_of(const ExperimentConfig& cfg) {
  const json bj = cfg.raw.value("budget", json::object());
  return cfg.method == "block_descent" ? get_or<double>(bj, "target_xi", 0.0) : get_or<double>(bj, "target_gap", 0.0);
}

/// Runs every seed; writes seed_<s>.csv, seed_<s>.meta.json, summary.json and appends to runs_index.csv.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write = true, bool measured_wall = false) {
  ExperimentResult res;
  res.config_hash = config_hash(cfg.raw);
  const double target = target_of(cfg);
  if (write) fs::create_directories(cfg.output);
  std::vector<double> reached;
  for (auto seed : cfg.seeds) {
    Trace t = run_once(cfg, seed);
    double nnz_scale = 1.0;
    if (cfg.method != "block_descent") {
      const Problem probe = build_problem(cfg.raw.at("problem"), cfg.base_dir);
      nnz_scale = static_cast<double>(probe.X().nnz());
    } else {
      nnz_scale = static_cast<double>(make_test_objective(parse_objective(cfg.raw.at("objective"))).dim);
    }
    SeedSummary s;
    s.seed = seed;
    s.rows = t.rows.size();
    s.epochs_to_target = epochs_to_target(t, target);
    s.status = t.status;
    if (s.epochs_to_target) reached.push_back(*s.epochs_to_target);
    if (write) {
      s.trace_path = cfg.output / ("seed_" + std::to_string(seed) + ".csv");
      write_atomic(s.trace_path, trace_to_csv(t, nnz_scale, measured_wall));
      json meta{{"config_hash", res.config_hash}, {"seed", seed},        {"version", kVersion},
                {"status", t.status},              {"iterations", t.iterations}, {"operations", t.operations},
                {"info", t.info}};
      json wall = json::array();
      for (const auto& r : t.rows) wall.push_back(r.wall_seconds);
      meta["wall_seconds"] = wall;
      write_atomic(cfg.output / ("seed_" + std::to_string(seed) + ".meta.json"), meta.dump(2) + "\n");
    }
    res.seeds.push_back(s);
    res.traces.push_back(std::move(t));
  }
  if (!reached.empty()) {
    double m = 0.0;
    for (double v : reached) m += v;
    m /= static_cast<double>(reached.size());
    double var = 0.0;
    for (double v : reached) var += (v - m) * (v - m);
    res.mean_epochs = m;
    res.std_epochs = reached.size() > 1 ? std::sqrt(var / static_cast<double>(reached.size() - 1)) : 0.0;
  }
  if (write) {
    json summary = json::array();
    for (const auto& s : res.seeds) {
      summary.push_back({{"config_hash", res.config_hash},
                         {"seed", s.seed},
                         {"rows", s.rows},
                         {"epochs_to_target", s.epochs_to_target ? json(*s.epochs_to_target) : json(nullptr)}});
    }
    write_atomic(cfg.output / "summary.json", summary.dump(2) + "\n");
    const fs::path index = cfg.output.parent_path().empty() ? fs::path("runs_index.csv")
                                                            : cfg.output.parent_path() / "runs_index.csv";
    const bool fresh = !fs::exists(index);
    std::ofstream idx(index, std::ios::app);
    if (!idx) throw Error("cannot append to " + index.string());
    if (fresh) idx << "name,config_hash,method,seeds,reached,mean_epochs_to_target,std_epochs_to_target\n";
    idx << cfg.name << ',' << res.config_hash << ',' << cfg.method << ',' << cfg.seeds.size() << ',' << reached.size()
        << ',' << (res.mean_epochs ? format_double(*res.mean_epochs) : "censored") << ','
        << (res.std_epochs ? format_double(*res.std_epochs) : "censored") << '\n';
  }
  return res;
}

struct SeededTrace {
  std::uint64_t seed = 0;
  Trace trace;
};

struct PairRatio {
  std::uint64_t seed = 0;
  std::optional<double> passes_a, passes_b;
  std::optional<double> ratio;  // passes_a / passes_b; empty when censored
  bool censored() const { return !ratio.has_value(); }
};

struct CompareResult {
  std::vector<PairRatio> pairs;
  std::size_t censored = 0;
  std::optional<double> mean, std;
  std::optional<double> theoretical;  // theta_b / theta_a when both traces carry theta
};

inline std::optional<double> passes_to_target(const Trace& t, double target) {
  for (const auto& r : t.rows)
    if (!std::isnan(r.gap) && r.gap <= target) return r.effective_passes;
  return std::nullopt;
}

/// Pairs runs by seed; ratio = passes of A over passes of B at the first gap <= target.
inline CompareResult compare_runs(const std::vector<SeededTrace>& a, const std::vector<SeededTrace>& b, double target) {
  if (!(target > 0.0)) throw InvalidArgument("compare needs a positive target");
  CompareResult res;
  std::map<std::uint64_t, const Trace*> bm;
  for (const auto& s : b) bm[s.seed] = &s.trace;
  std::vector<double> ratios;
  for (const auto& s : a) {
    auto it = bm.find(s.seed);
    if (it == bm.end()) continue;
    PairRatio pr;
    pr.seed = s.seed;
    pr.passes_a = passes_to_target(s.trace, target);
    pr.passes_b = passes_to_target(*it->second, target);
    if (pr.passes_a && pr.passes_b && *pr.passes_b > 0.0) {
      pr.ratio = *pr.passes_a / *pr.passes_b;
      ratios.push_back(*pr.ratio);
    } else {
      ++res.censored;
    }
    res.pairs.push_back(pr);
  }
  if (!ratios.empty()) {
    double m = 0.0;
    for (double r : ratios) m += r;
    m /= static_cast<double>(ratios.size());
    double var = 0.0;
    for (double r : ratios) var += (r - m) * (r - m);
    res.mean = m;
    res.std = ratios.size() > 1 ? std::sqrt(var / static_cast<double>(ratios.size() - 1)) : 0.0;
  }
  if (!a.empty() && !b.empty() && !a[0].trace.rows.empty() && !b[0].trace.rows.empty()) {
    const double ta = a[0].trace.rows.front().theta, tb = b[0].trace.rows.front().theta;
    if (std::isfinite(ta) && std::isfinite(tb) && ta > 0.0) res.theoretical = tb / ta;
  }
  return res;
}

inline json compare_to_json(const CompareResult& r) {
  json pairs = json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"seed", p.seed},
                     {"passes_a", p.passes_a ? json(*p.passes_a) : json("censored")},
                     {"passes_b", p.passes_b ? json(*p.passes_b) : json("censored")},
                     {"ratio", p.ratio ? json(*p.ratio) : json("censored")}});
  }
  return json{{"pairs", pairs},
              {"censored", r.censored},
              {"mean_ratio", r.mean ? json(*r.mean) : json("censored")},
              {"std_ratio", r.std ? json(*r.std) : json("censored")},
              {"theoretical_ratio", r.theoretical ? json(*r.theoretical) : json(nullptr)}};
}

/// Matches '*' and '?' against a file name.
inline bool wildcard_match(std::string_view pat, std::string_view s) {
  std::size_t p = 0, i = 0, star = std::string_view::npos, mark = 0;
  while (i < s.size()) {
    if (p < pat.size() && (pat[p] == '?' || pat[p] == s[i])) {
      ++p;
      ++i;
    } else if (p < pat.size() && pat[p] == '*') {
      star = p++;
      mark = i;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      i = ++mark;
    } else {
      return false;
    }
  }
  while (p < pat.size() && pat[p] == '*') ++p;
  return p == pat.size();
}

/// Expands a glob whose wildcards are confined to the last path component.
inline std::vector<fs::path> expand_glob(const std::string& pattern) {
  const fs::path p(pattern);
  const fs::path dir = p.parent_path().empty() ? fs::path(".") : p.parent_path();
  const std::string name = p.filename().string();
  std::vector<fs::path> out;
  if (name.find_first_of("*?") == std::string::npos) {
    if (fs::exists(p)) out.push_back(p);
    return out;
  }
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && wildcard_match(name, e.path().filename().string())) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

/// Seed from a "seed_<s>.csv" file name, else the position in the list.
inline std::vector<SeededTrace> load_traces(const std::vector<fs::path>& files) {
  std::vector<SeededTrace> out;
  for (std::size_t k = 0; k < files.size(); ++k) {
    SeededTrace s;
    s.seed = k;
    const auto stem = files[k].stem().string();
    if (stem.rfind("seed_", 0) == 0) {
      try {
        s.seed = std::stoull(stem.substr(5));
      } catch (const std::logic_error&) {
      }
    }
    s.trace = read_trace_file(files[k]);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace ascd
