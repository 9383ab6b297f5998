#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "ascd/eso.hpp"
#include "ascd/probability_tree.hpp"
#include "ascd/problem.hpp"
#include "ascd/rng.hpp"
#include "ascd/run_context.hpp"
#include "ascd/sampling.hpp"
#include "ascd/trace.hpp"

namespace ascd {

/// Dual iterate alpha and the paired primal point w = (1/(lambda n)) X alpha.
struct DualState {
  std::vector<double> alpha;
  std::vector<double> w;
};

struct DualOptions {
  Budget budget;
  std::vector<double> alpha0;  // empty means zero
  std::function<void(std::size_t, const DualState&)> on_iteration;
};

inline DualState make_dual_state(const Problem& p, std::span<const double> alpha0) {
  DualState s;
  if (alpha0.empty()) {
    s.alpha.assign(p.n(), 0.0);
  } else {
    if (alpha0.size() != p.n()) throw InvalidArgument("initial dual vector has the wrong length");
    s.alpha.assign(alpha0.begin(), alpha0.end());
  }
  s.w = primal_from_dual(p, s.alpha);
  return s;
}

/// Updates coordinate j with curvature v_j; eta is the logistic damping.
inline double dual_coordinate_step(const Problem& p, DualState& s, std::size_t j, double v_j, double eta) {
  const double ln = p.lambda * static_cast<double>(p.n());
  const double inner = p.X().col_dot(j, s.w);
  const double delta = dual_delta(p.loss, s.alpha[j], inner, v_j / ln, p.y()[j], eta);
  if (delta != 0.0) {
    s.alpha[j] += delta;
    p.X().col_axpy(j, delta / ln, s.w);
  }
  return delta;
}

/// eta = min_j q_j nlg / (v_j + nlg) over coordinates with q_j > 0.
inline double logistic_eta(std::span<const double> q, std::span<const double> v, double nlg) {
  double eta = 1.0;
  for (std::size_t j = 0; j < q.size(); ++j)
    if (q[j] > 0.0) eta = std::min(eta, q[j] * nlg / (v[j] + nlg));
  return eta;
}

namespace detail {

inline void check_dual_problem(const Problem& p) {
  p.validate();
  p.require_l2();
}

inline bool dual_checkpoint(RunContext& ctx, const Problem& p, DualState& s, std::size_t iter, double theta) {
  auto exact = primal_from_dual(p, s.alpha);
  ctx.track_drift(relative_drift(s.w, exact));
  s.w = std::move(exact);
  return ctx.record(iter, primal_value(p, s.w), dual_value(p, s.alpha), theta);
}

inline bool all_zero(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
}

}  // namespace detail

/// Dual coordinate ascent over a fixed sampling; serial samplings give SDCA.
/// Each j in S is updated against the same w, then w absorbs all changes.
inline Trace quartz_run(const Problem& p, const Sampling& sampling, const DualOptions& opt, Rng& rng) {
  detail::check_dual_problem(p);
  if (sampling.n != p.n()) throw InvalidArgument("sampling size does not match the number of examples");
  const double nlg = p.nlg();
  const auto v = eso_v(p.X(), sampling);
  const auto q = sampling.marginals();
  const bool logistic = p.loss.kind == LossKind::logistic;
  const double eta = logistic ? logistic_eta(q, v, nlg) : 0.0;
  double theta = std::numeric_limits<double>::infinity();
  bool zero_prob = false;
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (q[j] > 0.0) {
      theta = std::min(theta, q[j] * nlg / (v[j] + nlg));
    } else {
      zero_prob = true;
    }
  }
  if (zero_prob) theta = 0.0;

  const auto epoch_len = sampling.epoch_length(p.n());
  const bool chunked = sampling.rule == SamplingRule::chunked;
  detail::RunContext ctx(p, opt.budget, epoch_len, chunked ? CostMode::chunked : CostMode::standard,
                         chunked ? &sampling.partition : nullptr);
  if (zero_prob) ctx.trace().info["warning"] = "some coordinate has zero sampling probability";
  ctx.trace().info["method"] = "quartz";
  ctx.trace().info["sampling"] = to_string(sampling.rule);

  DualState s = make_dual_state(p, opt.alpha0);
  BlockSampler sampler(sampling);
  std::vector<std::size_t> S, groups;
  std::vector<double> deltas;
  const double ln = p.lambda * static_cast<double>(p.n());

  bool stop = detail::dual_checkpoint(ctx, p, s, 0, theta);
  for (std::size_t it = 0; !stop && it < ctx.max_iterations(); ++it) {
    sampler.draw(rng, S, chunked ? &groups : nullptr);
    ctx.meter().add(S, groups);
    deltas.resize(S.size());
    for (std::size_t k = 0; k < S.size(); ++k) {
      const auto j = S[k];
      const double inner = p.X().col_dot(j, s.w);
      deltas[k] = dual_delta(p.loss, s.alpha[j], inner, v[j] / ln, p.y()[j], eta);
    }
    for (std::size_t k = 0; k < S.size(); ++k) {
      const auto j = S[k];
      if (deltas[k] != 0.0) {
        s.alpha[j] += deltas[k];
        p.X().col_axpy(j, deltas[k] / ln, s.w);
      }
      ctx.visit_column(j);
    }
    if (opt.budget.record_sets) ctx.trace().sampled_sets.push_back(chunked ? groups : S);
    if (opt.on_iteration) opt.on_iteration(it + 1, s);
    if (ctx.at_checkpoint(it + 1)) stop = detail::dual_checkpoint(ctx, p, s, it + 1, theta);
  }
  Trace t = ctx.finish();
  t.operations = t.rows.empty() ? 0.0 : t.rows.back().effective_passes * static_cast<double>(p.X().nnz());
  return t;
}

/// SDCA with fixed serial probabilities p (uniform or importance).
inline Trace sdca_run(const Problem& p, std::vector<double> probs, const DualOptions& opt, Rng& rng) {
  Trace t = quartz_run(p, Sampling::serial(std::move(probs)), opt, rng);
  t.info["method"] = "sdca";
  return t;
}

/// Adaptive SDCA: every iteration recomputes all residues and samples
/// proportionally to |kappa_j| sqrt(v_j + nlg).
inline Trace adasdca_run(const Problem& p, const DualOptions& opt, Rng& rng) {
  detail::check_dual_problem(p);
  const double nlg = p.nlg();
  const auto v = v_serial(p.X());
  const double nnz = static_cast<double>(p.X().nnz());
  detail::RunContext ctx(p, opt.budget, p.n());
  ctx.trace().info["method"] = "adasdca";
  DualState s = make_dual_state(p, opt.alpha0);
  ProbabilityTree tree;
  double ops = 0.0;
  double theta = kNaN;

  bool stop = detail::dual_checkpoint(ctx, p, s, 0, theta);
  for (std::size_t it = 0; !stop && it < ctx.max_iterations(); ++it) {
    const auto kappa = residues(p, s.w, s.alpha);
    ctx.visit(nnz);
    ops += nnz;
    if (detail::all_zero(kappa)) {
      if (!ctx.at_checkpoint(it)) detail::dual_checkpoint(ctx, p, s, it, theta);
      ctx.trace().status = "optimal";
      break;
    }
    const auto probs = adasdca_probs(kappa, v, nlg);
    theta = theta_kappa_p(kappa, probs, v, nlg);
    const std::size_t before = tree.operations();
    tree.build(probs);
    const std::size_t j = tree.sample(rng);
    ops += static_cast<double>(tree.operations() - before);
    ctx.meter().add(std::span<const std::size_t>(&j, 1));
    dual_coordinate_step(p, s, j, v[j], nlg / (v[j] + nlg));
    ctx.visit_column(j);
    ops += static_cast<double>(p.X().col_nnz(j));
    if (opt.budget.record_sets) ctx.trace().sampled_sets.push_back({j});
    if (opt.on_iteration) opt.on_iteration(it + 1, s);
    if (ctx.at_checkpoint(it + 1)) stop = detail::dual_checkpoint(ctx, p, s, it + 1, theta);
  }
  Trace t = ctx.finish();
  t.operations = ops;
  return t;
}

enum class AdaPlusOption { I, II };

struct AdaPlusOptions {
  DualOptions base;
  double m = 10.0;
  AdaPlusOption option = AdaPlusOption::II;
  bool apply_decay = true;  // test hook: false reduces Option II to importance SDCA
};

/// Adaptive SDCA with per-epoch probability resets and multiplicative decay
/// of the sampled coordinate's weight between resets.
inline Trace adasdca_plus_run(const Problem& p, const AdaPlusOptions& opt, Rng& rng) {
  detail::check_dual_problem(p);
  if (!(opt.m > 1.0)) throw InvalidArgument("decay factor m must exceed 1");
  const double nlg = p.nlg();
  const auto v = v_serial(p.X());
  const double nnz = static_cast<double>(p.X().nnz());
  const std::size_t n = p.n();
  detail::RunContext ctx(p, opt.base.budget, n);
  ctx.trace().info["method"] = "adasdca_plus";
  ctx.trace().info["option"] = opt.option == AdaPlusOption::I ? "I" : "II";
  DualState s = make_dual_state(p, opt.base.alpha0);
  const bool logistic = p.loss.kind == LossKind::logistic;
  const auto p_imp = importance_probs(v, nlg);
  const double eta_imp = logistic ? logistic_eta(p_imp, v, nlg) : 0.0;
  ProbabilityTree tree;
  double ops = 0.0;
  const double theta_imp = nlg / std::accumulate(v.begin(), v.end(), static_cast<double>(n) * nlg);
  double theta = opt.option == AdaPlusOption::II ? theta_imp : kNaN;

  bool stop = detail::dual_checkpoint(ctx, p, s, 0, theta);
  for (std::size_t it = 0; !stop && it < ctx.max_iterations(); ++it) {
    if (it % n == 0) {
      const std::size_t before = tree.operations();
      if (opt.option == AdaPlusOption::I) {
        const auto kappa = residues(p, s.w, s.alpha);
        ctx.visit(nnz);
        ops += nnz;
        if (detail::all_zero(kappa)) {
          ctx.trace().status = "optimal";
          break;
        }
        const auto probs = adasdca_probs(kappa, v, nlg);
        theta = theta_kappa_p(kappa, probs, v, nlg);
        tree.build(probs);
      } else {
        theta = theta_imp;
        tree.build(p_imp);
      }
      ops += static_cast<double>(tree.operations() - before);
    }
    const std::size_t before = tree.operations();
    const std::size_t j = tree.sample(rng);
    ctx.meter().add(std::span<const std::size_t>(&j, 1));
    const double eta = !logistic ? 0.0 : (opt.option == AdaPlusOption::II ? eta_imp : nlg / (v[j] + nlg));
    dual_coordinate_step(p, s, j, v[j], eta);
    ctx.visit_column(j);
    ops += static_cast<double>(p.X().col_nnz(j));
    if (opt.apply_decay) tree.update(j, tree.weight(j) / opt.m);
    ops += static_cast<double>(tree.operations() - before);
    if (opt.base.budget.record_sets) ctx.trace().sampled_sets.push_back({j});
    if (opt.base.on_iteration) opt.base.on_iteration(it + 1, s);
    if (ctx.at_checkpoint(it + 1)) stop = detail::dual_checkpoint(ctx, p, s, it + 1, theta);
  }
  Trace t = ctx.finish();
  t.operations = ops;
  return t;
}

}  // namespace ascd
