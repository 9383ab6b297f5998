#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ascd/dual_solvers.hpp"
#include "ascd/eso.hpp"
#include "ascd/problem.hpp"
#include "ascd/rng.hpp"
#include "ascd/run_context.hpp"
#include "ascd/sampling.hpp"
#include "ascd/trace.hpp"

namespace ascd {

/// Known optimum (w*, alpha* = -phi'(X^T w*)).
struct ReferenceOptimum {
  std::vector<double> w;
  std::vector<double> alpha;
};

/// (lambda/2)||w - w*||^2 + (gamma/2n)||alpha - alpha*||^2.
inline double dfsdca_potential(const Problem& p, std::span<const double> w, std::span<const double> alpha,
                               const ReferenceOptimum& ref) {
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) a += (w[i] - ref.w[i]) * (w[i] - ref.w[i]);
  for (std::size_t j = 0; j < alpha.size(); ++j) b += (alpha[j] - ref.alpha[j]) * (alpha[j] - ref.alpha[j]);
  return 0.5 * p.lambda * a + 0.5 * p.loss.gamma / static_cast<double>(p.n()) * b;
}

/// Largest stepsize allowed by the ESO: 1/theta = max_j (1/p_j + v_j / (p_j nlg)).
inline double dfsdca_stepsize(std::span<const double> p, std::span<const double> v, double nlg) {
  return eso_theta(p, v, nlg);
}

struct DfsdcaOptions {
  Budget budget;
  std::vector<double> alpha0;  // empty means zero
  std::optional<ReferenceOptimum> reference;
  std::function<void(std::size_t, const DualState&)> on_iteration;
};

/// Dual-free SDCA: alpha_j moves towards -phi'(<X_:j, w>) by theta/p_j and
/// w = (1/(lambda n)) X alpha is maintained incrementally.
inline Trace dfsdca_run(const Problem& p, const Sampling& sampling, const DfsdcaOptions& opt, Rng& rng) {
  p.validate();
  p.require_l2();
  if (sampling.n != p.n()) throw InvalidArgument("sampling size does not match the number of examples");
  const double nlg = p.nlg();
  const auto v = eso_v(p.X(), sampling);
  const auto q = sampling.marginals();
  const double theta = dfsdca_stepsize(q, v, nlg);
  const auto epoch_len = sampling.epoch_length(p.n());
  const bool chunked = sampling.rule == SamplingRule::chunked;
  detail::RunContext ctx(p, opt.budget, epoch_len, chunked ? CostMode::chunked : CostMode::standard,
                         chunked ? &sampling.partition : nullptr);
  ctx.trace().info["method"] = "dfsdca";
  ctx.trace().info["sampling"] = to_string(sampling.rule);

  DualState s = make_dual_state(p, opt.alpha0);
  BlockSampler sampler(sampling);
  std::vector<std::size_t> S, groups;
  std::vector<double> deltas;
  const double ln = p.lambda * static_cast<double>(p.n());

  auto checkpoint = [&](std::size_t iter) {
    auto exact = primal_from_dual(p, s.alpha);
    ctx.track_drift(detail::relative_drift(s.w, exact));
    s.w = std::move(exact);
    const double pot = opt.reference ? dfsdca_potential(p, s.w, s.alpha, *opt.reference) : kNaN;
    return ctx.record(iter, primal_value(p, s.w), dual_value(p, s.alpha), theta, pot);
  };

  bool stop = checkpoint(0);
  for (std::size_t it = 0; !stop && it < ctx.max_iterations(); ++it) {
    sampler.draw(rng, S, chunked ? &groups : nullptr);
    ctx.meter().add(S, groups);
    deltas.resize(S.size());
    for (std::size_t k = 0; k < S.size(); ++k) {
      const auto j = S[k];
      deltas[k] = loss_deriv(p.loss, p.X().col_dot(j, s.w), p.y()[j]) + s.alpha[j];
    }
    for (std::size_t k = 0; k < S.size(); ++k) {
      const auto j = S[k];
      const double step = theta / q[j];
      if (deltas[k] != 0.0) {
        s.alpha[j] -= step * deltas[k];
        p.X().col_axpy(j, -step * deltas[k] / ln, s.w);
      }
      ctx.visit_column(j);
    }
    if (opt.budget.record_sets) ctx.trace().sampled_sets.push_back(chunked ? groups : S);
    if (opt.on_iteration) opt.on_iteration(it + 1, s);
    if (ctx.at_checkpoint(it + 1)) stop = checkpoint(it + 1);
  }
  Trace t = ctx.finish();
  t.operations = ctx.visited();
  return t;
}

/// Largest eigenvalue of X X^T by power iteration.
inline double lambda_max_xxt(const SparseMatrix& X, double tol = 1e-6, std::size_t max_iter = 10000) {
  const std::size_t d = X.rows();
  std::vector<double> x(d);
  for (std::size_t i = 0; i < d; ++i) x[i] = 1.0 + 1e-3 * static_cast<double>(i % 7);
  double est = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    double nx = 0.0;
    for (double v : x) nx += v * v;
    nx = std::sqrt(nx);
    if (nx == 0.0) return 0.0;
    for (auto& v : x) v /= nx;
    const auto z = X.transpose_times(x);
    auto y = X.times(z);
    double ray = 0.0;
    for (std::size_t i = 0; i < d; ++i) ray += x[i] * y[i];
    const bool done = std::abs(ray - est) <= tol * std::max(ray, 1e-300);
    est = ray;
    x = std::move(y);
    if (done) break;
  }
  return est;
}

/// Feature-side ESO vector u for a sampling over the d rows of X.
/// The full batch uses u_i = lambda_max(X X^T) for every i.
inline std::vector<double> eso_u(const SparseMatrix& X, const Sampling& s) {
  const bool full = (s.rule == SamplingRule::tau_nice && s.tau == s.n) ||
                    (s.rule == SamplingRule::bucket && s.partition.size() == s.n);
  if (full) return std::vector<double>(X.rows(), lambda_max_xxt(X));
  return eso_v(X.transpose(), s);
}

struct NsyncState {
  std::vector<double> w;
  std::vector<double> z;  // X^T w
};

struct NsyncOptions {
  Budget budget;
  std::vector<double> w0;  // empty means zero
  std::function<void(std::size_t, const NsyncState&)> on_iteration;
};

/// Dual point paired with w: alpha_j = -phi'(<X_:j, w>).
inline std::vector<double> dual_from_primal(const Problem& p, std::span<const double> z) {
  std::vector<double> a(p.n());
  for (std::size_t j = 0; j < p.n(); ++j) a[j] = -loss_deriv(p.loss, z[j], p.y()[j]);
  return a;
}

/// Primal randomized coordinate descent over features:
/// w_i -= ((1/n) sum_j phi'(z_j) X_ij + lambda w_i) / (u_i/(gamma n) + lambda).
inline Trace nsync_run(const Problem& p, const Sampling& sampling, const NsyncOptions& opt, Rng& rng) {
  p.validate();
  p.require_l2();
  const std::size_t d = p.d();
  if (sampling.n != d) throw InvalidArgument("feature sampling size does not match the number of features");
  const double n = static_cast<double>(p.n());
  const auto u = eso_u(p.X(), sampling);
  const auto q = sampling.marginals();
  double rate = std::numeric_limits<double>::infinity();
  bool zero_prob = false;
  for (std::size_t i = 0; i < d; ++i) {
    if (q[i] > 0.0) {
      rate = std::min(rate, q[i] * p.nlg() / (u[i] + p.nlg()));
    } else {
      zero_prob = true;
    }
  }
  if (zero_prob) rate = 0.0;
  const auto epoch_len = sampling.epoch_length(d);
  const bool chunked = sampling.rule == SamplingRule::chunked;
  detail::RunContext ctx(p, opt.budget, epoch_len, chunked ? CostMode::chunked : CostMode::standard,
                         chunked ? &sampling.partition : nullptr, row_stats(p.X()).nnz);
  ctx.trace().info["method"] = "nsync";
  ctx.trace().info["sampling"] = to_string(sampling.rule);
  if (zero_prob) ctx.trace().info["warning"] = "some feature has zero sampling probability";

  NsyncState s;
  if (opt.w0.empty()) {
    s.w.assign(d, 0.0);
  } else {
    if (opt.w0.size() != d) throw InvalidArgument("initial primal vector has the wrong length");
    s.w = opt.w0;
  }
  s.z = p.X().transpose_times(s.w);
  BlockSampler sampler(sampling);
  std::vector<std::size_t> S, groups;
  std::vector<double> deltas;
  std::vector<double> dphi(p.n());

  auto checkpoint = [&](std::size_t iter) {
    auto exact = p.X().transpose_times(s.w);
    ctx.track_drift(detail::relative_drift(s.z, exact));
    s.z = std::move(exact);
    const double primal = primal_value_from_margins(p, s.z, s.w);
    const double dual = dual_value(p, dual_from_primal(p, s.z));
    return ctx.record(iter, primal, dual, rate);
  };

  bool stop = checkpoint(0);
  for (std::size_t it = 0; !stop && it < ctx.max_iterations(); ++it) {
    sampler.draw(rng, S, chunked ? &groups : nullptr);
    ctx.meter().add(S, groups);
    deltas.resize(S.size());
    for (std::size_t k = 0; k < S.size(); ++k) {
      const auto i = S[k];
      double g = 0.0;
      for (const auto& e : p.X().row(i)) g += loss_deriv(p.loss, s.z[e.index], p.y()[e.index]) * e.value;
      g = g / n + p.lambda * s.w[i];
      deltas[k] = -g / (u[i] / (p.loss.gamma * n) + p.lambda);
    }
    for (std::size_t k = 0; k < S.size(); ++k) {
      const auto i = S[k];
      if (deltas[k] != 0.0) {
        s.w[i] += deltas[k];
        p.X().row_axpy(i, deltas[k], s.z);
      }
      ctx.visit_row(i);
    }
    if (opt.budget.record_sets) ctx.trace().sampled_sets.push_back(chunked ? groups : S);
    if (opt.on_iteration) opt.on_iteration(it + 1, s);
    if (ctx.at_checkpoint(it + 1)) stop = checkpoint(it + 1);
  }
  Trace t = ctx.finish();
  t.operations = ctx.visited();
  return t;
}

}  // namespace ascd
