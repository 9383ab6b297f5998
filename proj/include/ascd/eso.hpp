#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ascd/combinatorics.hpp"
#include "ascd/error.hpp"
#include "ascd/rng.hpp"
#include "ascd/sampling.hpp"
#include "ascd/sparse_matrix.hpp"

namespace ascd {

inline std::vector<double> v_serial(const SparseMatrix& X) { return col_stats(X).norms_sq; }
inline std::vector<double> u_serial(const SparseMatrix& X) { return row_stats(X).norms_sq; }

/// v_j = sum_i (1 + (|J_i| - 1)(tau - 1)/(n - 1)) X_ij^2.
inline std::vector<double> v_tau_nice(const SparseMatrix& X, std::size_t tau) {
  const std::size_t n = X.cols();
  if (tau == 0 || tau > n) throw InvalidArgument("tau-nice needs 1 <= tau <= n");
  if (tau == 1 || n == 1) return v_serial(X);
  std::vector<double> v(n, 0.0);
  const double f = static_cast<double>(tau - 1) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const double c = 1.0 + (static_cast<double>(X.row_nnz(i)) - 1.0) * f;
    for (const auto& e : X.row(i)) v[e.index] += c * e.value * e.value;
  }
  return v;
}

/// Bucket sampling: v_j = sum_i (1 + (1 - 1/w_i) delta_i) X_ij^2 with
/// delta_i = sum_{j in J_i} p_j and w_i the number of buckets meeting J_i.
inline std::vector<double> v_bucket(const SparseMatrix& X, const Partition& B, std::span<const double> p) {
  const auto owner = B.group_of();
  std::vector<double> v(X.cols(), 0.0);
  std::vector<std::size_t> stamp(B.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    double delta = 0.0;
    std::size_t omega = 0;
    for (const auto& e : X.row(i)) {
      delta += p[e.index];
      const auto l = owner[e.index];
      if (stamp[l] != i) {
        stamp[l] = i;
        ++omega;
      }
    }
    if (omega == 0) continue;
    const double c = 1.0 + (1.0 - 1.0 / static_cast<double>(omega)) * delta;
    for (const auto& e : X.row(i)) v[e.index] += c * e.value * e.value;
  }
  return v;
}

/// Uniform-bucket form: delta_i replaced by tau |J_i| / n.
inline std::vector<double> v_bucket_uniform(const SparseMatrix& X, const Partition& B) {
  const auto owner = B.group_of();
  const double tau = static_cast<double>(B.size());
  const double n = static_cast<double>(X.cols());
  std::vector<double> v(X.cols(), 0.0);
  std::vector<std::size_t> stamp(B.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    std::size_t omega = 0;
    for (const auto& e : X.row(i)) {
      const auto l = owner[e.index];
      if (stamp[l] != i) {
        stamp[l] = i;
        ++omega;
      }
    }
    if (omega == 0) continue;
    const double delta = tau * static_cast<double>(X.row_nnz(i)) / n;
    const double c = 1.0 + (1.0 - 1.0 / static_cast<double>(omega)) * delta;
    for (const auto& e : X.row(i)) v[e.index] += c * e.value * e.value;
  }
  return v;
}

/// Chunked sampling (tau of k groups, uniformly): tau-nice bound over groups
/// combined with Cauchy-Schwarz inside each group,
/// v_j = sum_i (1 + (w_i - 1)(tau - 1)/(k - 1)) |G(j) cap J_i| X_ij^2.
inline std::vector<double> v_chunked(const SparseMatrix& X, const Partition& G, std::size_t tau) {
  const auto owner = G.group_of();
  const std::size_t k = G.size();
  std::vector<double> v(X.cols(), 0.0);
  std::vector<std::size_t> count(k, 0);
  std::vector<std::size_t> touched;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    touched.clear();
    for (const auto& e : X.row(i)) {
      const auto l = owner[e.index];
      if (count[l]++ == 0) touched.push_back(l);
    }
    const double omega = static_cast<double>(touched.size());
    const double c =
        k > 1 ? 1.0 + (omega - 1.0) * static_cast<double>(tau - 1) / static_cast<double>(k - 1) : 1.0;
    for (const auto& e : X.row(i))
      v[e.index] += c * static_cast<double>(count[owner[e.index]]) * e.value * e.value;
    for (auto l : touched) count[l] = 0;
  }
  return v;
}

/// ESO vector v for a sampling over the columns of X.
inline std::vector<double> eso_v(const SparseMatrix& X, const Sampling& s) {
  switch (s.rule) {
    case SamplingRule::serial: return v_serial(X);
    case SamplingRule::tau_nice: return v_tau_nice(X, s.tau);
    case SamplingRule::bucket: return v_bucket(X, s.partition, s.p);
    case SamplingRule::chunked: return v_chunked(X, s.partition, s.tau);
  }
  return {};
}

/// 1/theta = max_j (1/p_j + v_j / (p_j nlg)).
inline double eso_theta(std::span<const double> p, std::span<const double> v, double nlg) {
  double inv = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (!(p[j] > 0.0)) throw InvalidArgument("stepsize needs p_j > 0 for every coordinate");
    inv = std::max(inv, (1.0 + v[j] / nlg) / p[j]);
  }
  return 1.0 / inv;
}

/// 1/theta = n/tau + max_j v_j / (tau lambda gamma), with v from the tau-nice formula.
inline double theta_tau_nice(std::span<const double> v_nice, std::size_t tau, double lambda, double gamma) {
  const double n = static_cast<double>(v_nice.size());
  const double t = static_cast<double>(tau);
  const double vmax = *std::max_element(v_nice.begin(), v_nice.end());
  return 1.0 / (n / t + vmax / (t * lambda * gamma));
}

inline double speedup_sigma(const SparseMatrix& X) {
  if (X.cols() == 0) throw InvalidArgument("speedup of an empty matrix");
  const auto v = v_serial(X);
  double mx = 0.0, mean = 0.0;
  for (double x : v) {
    mx = std::max(mx, x);
    mean += x;
  }
  mean /= static_cast<double>(v.size());
  if (!(mean > 0.0)) throw InvalidArgument("speedup of a zero matrix");
  return mx / mean;
}

/// beta_l = max_{j in B_l} (nlg + s_j) / (nlg + v_unif_j), s = v_bucket(X, B, p_star).
inline std::vector<double> beta_factors(const SparseMatrix& X, const Partition& B, std::span<const double> p_star,
                                        double nlg, std::span<const double> v_unif) {
  const auto s = v_bucket(X, B, p_star);
  std::vector<double> beta(B.size(), 0.0);
  for (std::size_t l = 0; l < B.size(); ++l)
    for (auto j : B.groups[l]) beta[l] = std::max(beta[l], (nlg + s[j]) / (nlg + v_unif[j]));
  return beta;
}

/// 1/theta = max_l (n/tau + (tau/n) sum_{B_l} v_unif / (tau lambda gamma)) beta_l.
inline double theta_tau_imp(const SparseMatrix& X, const Partition& B, double lambda, double gamma) {
  const double n = static_cast<double>(X.cols());
  const double tau = static_cast<double>(B.size());
  const double nlg = n * lambda * gamma;
  const auto vu = v_bucket_uniform(X, B);
  const auto p = bucket_probs_practical(vu, nlg, B);
  const auto beta = beta_factors(X, B, p, nlg, vu);
  double inv = 0.0;
  for (std::size_t l = 0; l < B.size(); ++l) {
    double s = 0.0;
    for (auto j : B.groups[l]) s += vu[j];
    inv = std::max(inv, (n / tau + (tau / n) * s / (tau * lambda * gamma)) * beta[l]);
  }
  return 1.0 / inv;
}

struct AlternatingResult {
  std::vector<double> p;
  std::vector<double> v;
  std::vector<double> max_changes;  // max_j |p_new - p_old| per sweep
  bool converged = false;
};

/// Alternates v <- bucket formula(p) and p <- within-bucket normalization of nlg + v.
inline AlternatingResult bucket_probs_alternating(const SparseMatrix& X, const Partition& B, double nlg, double tol,
                                                  std::size_t max_iter) {
  AlternatingResult r;
  r.p.assign(X.cols(), 0.0);
  for (const auto& g : B.groups)
    for (auto j : g) r.p[j] = 1.0 / static_cast<double>(g.size());
  for (std::size_t it = 0; it < max_iter; ++it) {
    r.v = v_bucket(X, B, r.p);
    auto p_new = bucket_probs_practical(r.v, nlg, B);
    double change = 0.0;
    for (std::size_t j = 0; j < p_new.size(); ++j) change = std::max(change, std::abs(p_new[j] - r.p[j]));
    r.p = std::move(p_new);
    r.max_changes.push_back(change);
    if (change <= tol) {
      r.converged = true;
      break;
    }
  }
  r.v = v_bucket(X, B, r.p);
  return r;
}

struct LTau {
  double value = 0.0;
  bool exact = false;
};

/// max over tau-subsets S of lambda_max(M_S); the sum of the tau largest
/// diagonal entries when there are more than 1e4 subsets.
inline LTau L_tau(const Eigen::MatrixXd& M, std::size_t tau) {
  const auto n = static_cast<std::size_t>(M.rows());
  if (tau == 0 || tau > n) throw InvalidArgument("L_tau needs 1 <= tau <= n");
  if (tau == 1) return {M.diagonal().maxCoeff(), true};
  if (tau == n) return {Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff(), true};
  if (binomial(n, tau) <= 10000) {
    double best = 0.0;
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(tau), static_cast<Eigen::Index>(tau));
    for_each_subset(n, tau, [&](const std::vector<std::size_t>& S) {
      for (std::size_t a = 0; a < tau; ++a)
        for (std::size_t b = 0; b < tau; ++b)
          sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
              M(static_cast<Eigen::Index>(S[a]), static_cast<Eigen::Index>(S[b]));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub, Eigen::EigenvaluesOnly);
      best = std::max(best, es.eigenvalues().maxCoeff());
    });
    return {best, true};
  }
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
  std::sort(diag.begin(), diag.end(), std::greater<>());
  double s = 0.0;
  for (std::size_t i = 0; i < tau; ++i) s += diag[i];
  return {s, false};
}

struct EsoCheckReport {
  double max_z = -std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;  // largest LHS estimate / RHS
  std::size_t trials = 0;
  std::size_t h_draws = 0;

  bool passed(double threshold = 3.0) const { return max_z <= threshold; }
};

/// Monte Carlo check of E||sum_{j in S} h_j X_:j||^2 <= sum_j p_j v_j h_j^2.
/// Even draws use Gaussian h; odd draws use |g_j| sign(<X_:j, u>) for a
/// Gaussian u, so that the columns add up coherently.
/// Reports the largest standardized exceedance.
inline EsoCheckReport eso_mc_check(const SparseMatrix& X, const Sampling& s, std::span<const double> v,
                                   std::size_t trials, std::size_t h_draws, Rng& rng) {
  if (trials < 2) throw InvalidArgument("ESO check needs at least 2 trials");
  EsoCheckReport rep;
  rep.trials = trials;
  rep.h_draws = h_draws;
  const auto p = s.marginals();
  BlockSampler sampler(s);
  Rng r_h = rng.split("h");
  Rng r_s = rng.split("sets");
  std::vector<double> h(X.cols()), u(X.rows()), acc(X.rows(), 0.0);
  std::vector<std::size_t> S, touched;
  std::vector<char> mark(X.rows(), 0);
  for (std::size_t k = 0; k < h_draws; ++k) {
    for (auto& x : h) x = r_h.normal();
    if (k % 2 == 1) {
      for (auto& x : u) x = r_h.normal();
      for (std::size_t j = 0; j < h.size(); ++j) h[j] = X.col_dot(j, u) < 0.0 ? -std::abs(h[j]) : std::abs(h[j]);
    }
    double rhs = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) rhs += p[j] * v[j] * h[j] * h[j];
    double mean = 0.0, m2 = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      sampler.draw(r_s, S);
      for (auto j : S) {
        for (const auto& e : X.col(j)) {
          if (!mark[e.index]) {
            mark[e.index] = 1;
            touched.push_back(e.index);
          }
          acc[e.index] += h[j] * e.value;
        }
      }
      double val = 0.0;
      for (auto i : touched) {
        val += acc[i] * acc[i];
        acc[i] = 0.0;
        mark[i] = 0;
      }
      touched.clear();
      const double delta = val - mean;
      mean += delta / static_cast<double>(t + 1);
      m2 += delta * (val - mean);
    }
    const double var = m2 / static_cast<double>(trials - 1);
    const double se = std::sqrt(var / static_cast<double>(trials));
    const double excess = mean - rhs;
    double z;
    if (se > 1e-12 * std::max(1.0, std::abs(rhs))) {
      z = excess / se;
    } else {
      z = excess > 1e-9 * std::max(1.0, std::abs(rhs)) ? std::numeric_limits<double>::infinity() : 0.0;
    }
    rep.max_z = std::max(rep.max_z, z);
    if (rhs > 0.0) rep.max_ratio = std::max(rep.max_ratio, mean / rhs);
  }
  return rep;
}

}  // namespace ascd
