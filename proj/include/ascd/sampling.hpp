#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ascd/error.hpp"
#include "ascd/probability_tree.hpp"
#include "ascd/rng.hpp"

namespace ascd {

/// p_j proportional to v_j + n lambda gamma.
inline std::vector<double> importance_probs(std::span<const double> v, double nlg) {
  if (!(nlg > 0.0)) throw InvalidArgument("importance probabilities need n*lambda*gamma > 0");
  std::vector<double> p(v.size());
  double s = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v[j] < 0.0) throw InvalidArgument("ESO parameters must be nonnegative");
    p[j] = v[j] + nlg;
    s += p[j];
  }
  for (auto& x : p) x /= s;
  return p;
}

/// p_j proportional to |kappa_j| sqrt(v_j + n lambda gamma). Throws when kappa is zero.
inline std::vector<double> adasdca_probs(std::span<const double> kappa, std::span<const double> v, double nlg) {
  std::vector<double> p(kappa.size());
  double s = 0.0;
  for (std::size_t j = 0; j < kappa.size(); ++j) {
    p[j] = std::abs(kappa[j]) * std::sqrt(v[j] + nlg);
    s += p[j];
  }
  if (!(s > 0.0)) throw InvalidArgument("all dual residues are zero");
  for (auto& x : p) x /= s;
  return p;
}

/// theta(kappa, p) = nlg sum |k_j|^2 / sum p_j^-1 |k_j|^2 (v_j + nlg), over j with k_j != 0.
inline double theta_kappa_p(std::span<const double> kappa, std::span<const double> p, std::span<const double> v,
                            double nlg) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < kappa.size(); ++j) {
    if (kappa[j] == 0.0) continue;
    if (!(p[j] > 0.0)) throw InvalidArgument("probabilities are not coherent with the residues");
    const double k2 = kappa[j] * kappa[j];
    num += k2;
    den += k2 * (v[j] + nlg) / p[j];
  }
  if (num == 0.0) throw InvalidArgument("all dual residues are zero");
  return nlg * num / den;
}

/// Disjoint nonempty groups covering [0, n).
struct Partition {
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> groups;

  std::size_t size() const noexcept { return groups.size(); }

  void validate() const {
    std::vector<char> seen(n, 0);
    for (const auto& g : groups) {
      if (g.empty()) throw InvalidArgument("partition has an empty group");
      for (auto j : g) {
        if (j >= n || seen[j]) throw InvalidArgument("partition groups must be disjoint and in range");
        seen[j] = 1;
      }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw InvalidArgument("partition does not cover [n]");
  }

  std::vector<std::size_t> group_of() const {
    std::vector<std::size_t> out(n);
    for (std::size_t l = 0; l < groups.size(); ++l)
      for (auto j : groups[l]) out[j] = l;
    return out;
  }
};

/// Contiguous groups whose nnz sums stay below the largest single nnz.
inline Partition naive_chunks(std::span<const std::size_t> nnz) {
  Partition part;
  part.n = nnz.size();
  if (nnz.empty()) return part;
  const std::size_t m = *std::max_element(nnz.begin(), nnz.end());
  std::size_t load = 0;
  for (std::size_t t = 0; t < nnz.size(); ++t) {
    if (nnz[t] == 0) throw InvalidArgument("naive chunks needs nnz >= 1 per example");
    if (!part.groups.empty() && load + nnz[t] <= m) {
      part.groups.back().push_back(t);
      load += nnz[t];
    } else {
      part.groups.push_back({t});
      load = nnz[t];
    }
  }
  return part;
}

/// Uniformly random permutation split into tau buckets of near-equal size.
inline Partition random_buckets(std::size_t n, std::size_t tau, Rng& rng) {
  if (tau == 0 || tau > n) throw InvalidArgument("bucket count must satisfy 1 <= tau <= n");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
  Partition part;
  part.n = n;
  part.groups.resize(tau);
  std::size_t pos = 0;
  for (std::size_t l = 0; l < tau; ++l) {
    const std::size_t sz = n / tau + (l < n % tau ? 1 : 0);
    part.groups[l].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                          perm.begin() + static_cast<std::ptrdiff_t>(pos + sz));
    std::sort(part.groups[l].begin(), part.groups[l].end());
    pos += sz;
  }
  return part;
}

/// Within-bucket normalization of nlg + v_j.
inline std::vector<double> bucket_probs_practical(std::span<const double> v_unif, double nlg, const Partition& B) {
  std::vector<double> p(B.n, 0.0);
  for (const auto& g : B.groups) {
    double s = 0.0;
    for (auto j : g) s += nlg + v_unif[j];
    for (auto j : g) p[j] = (nlg + v_unif[j]) / s;
  }
  return p;
}

enum class SamplingRule { serial, tau_nice, bucket, chunked };

inline std::string to_string(SamplingRule r) {
  switch (r) {
    case SamplingRule::serial: return "serial";
    case SamplingRule::tau_nice: return "tau_nice";
    case SamplingRule::bucket: return "bucket";
    case SamplingRule::chunked: return "chunked";
  }
  return "?";
}

/// Random block-selection rule over [0, n).
///   serial:   one index drawn from p
///   tau_nice: uniform tau-subset
///   bucket:   one index per group, drawn from p restricted to the group
///   chunked:  tau groups chosen uniformly, S is their union
struct Sampling {
  SamplingRule rule = SamplingRule::serial;
  std::size_t n = 0;
  std::size_t tau = 1;
  std::vector<double> p;
  Partition partition;

  static Sampling serial(std::vector<double> p) {
    Sampling s;
    s.rule = SamplingRule::serial;
    s.n = p.size();
    s.p = std::move(p);
    s.validate();
    return s;
  }
  static Sampling uniform_serial(std::size_t n) { return serial(std::vector<double>(n, 1.0 / static_cast<double>(n))); }
  static Sampling tau_nice(std::size_t n, std::size_t tau) {
    Sampling s;
    s.rule = SamplingRule::tau_nice;
    s.n = n;
    s.tau = tau;
    s.validate();
    return s;
  }
  static Sampling bucket(Partition b, std::vector<double> p) {
    Sampling s;
    s.rule = SamplingRule::bucket;
    s.n = b.n;
    s.tau = b.size();
    s.partition = std::move(b);
    s.p = std::move(p);
    s.validate();
    return s;
  }
  static Sampling chunked(Partition g, std::size_t tau) {
    Sampling s;
    s.rule = SamplingRule::chunked;
    s.n = g.n;
    s.tau = tau;
    s.partition = std::move(g);
    s.validate();
    return s;
  }

  void validate() const {
    constexpr double tol = 1e-9;
    if (n == 0) throw InvalidArgument("sampling over an empty set");
    switch (rule) {
      case SamplingRule::serial: {
        if (p.size() != n) throw InvalidArgument("serial sampling needs n probabilities");
        double s = 0.0;
        for (double x : p) {
          if (!(x >= 0.0)) throw InvalidArgument("probabilities must be nonnegative");
          s += x;
        }
        if (std::abs(s - 1.0) > tol) throw InvalidArgument("serial probabilities must sum to 1");
        break;
      }
      case SamplingRule::tau_nice:
        if (tau == 0 || tau > n) throw InvalidArgument("tau-nice sampling needs 1 <= tau <= n");
        break;
      case SamplingRule::bucket: {
        partition.validate();
        if (p.size() != n) throw InvalidArgument("bucket sampling needs n probabilities");
        for (const auto& g : partition.groups) {
          double s = 0.0;
          for (auto j : g) {
            if (!(p[j] >= 0.0)) throw InvalidArgument("probabilities must be nonnegative");
            s += p[j];
          }
          if (std::abs(s - 1.0) > tol) throw InvalidArgument("bucket probabilities must sum to 1 in every bucket");
        }
        break;
      }
      case SamplingRule::chunked:
        partition.validate();
        if (tau == 0 || tau > partition.size()) throw InvalidArgument("chunked sampling needs 1 <= tau <= #groups");
        break;
    }
  }

  /// P(j in S).
  std::vector<double> marginals() const {
    switch (rule) {
      case SamplingRule::serial:
      case SamplingRule::bucket: return p;
      case SamplingRule::tau_nice:
        return std::vector<double>(n, static_cast<double>(tau) / static_cast<double>(n));
      case SamplingRule::chunked:
        return std::vector<double>(n, static_cast<double>(tau) / static_cast<double>(partition.size()));
    }
    return {};
  }

  double expected_size() const {
    const auto m = marginals();
    return std::accumulate(m.begin(), m.end(), 0.0);
  }

  /// ceil(count / E|S|), ignoring rounding noise in the marginals.
  std::size_t epoch_length(std::size_t count) const {
    const double r = static_cast<double>(count) / expected_size();
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(r - 1e-9 * r)));
  }
};

/// Draws blocks from a Sampling. Owns its trees and scratch permutations.
class BlockSampler {
 public:
  explicit BlockSampler(const Sampling& s) : s_(s) {
    switch (s_.rule) {
      case SamplingRule::serial: trees_.emplace_back(s_.p); break;
      case SamplingRule::tau_nice:
        perm_.resize(s_.n);
        std::iota(perm_.begin(), perm_.end(), 0);
        break;
      case SamplingRule::bucket:
        for (const auto& g : s_.partition.groups) {
          std::vector<double> w(g.size());
          for (std::size_t k = 0; k < g.size(); ++k) w[k] = s_.p[g[k]];
          trees_.emplace_back(w);
        }
        break;
      case SamplingRule::chunked:
        perm_.resize(s_.partition.size());
        std::iota(perm_.begin(), perm_.end(), 0);
        break;
    }
  }

  const Sampling& sampling() const noexcept { return s_; }

  /// Fills `out` with the sampled indices in ascending order; for chunked
  /// sampling `groups_out` (if given) receives the chosen group ids.
  void draw(Rng& rng, std::vector<std::size_t>& out, std::vector<std::size_t>* groups_out = nullptr) {
    out.clear();
    switch (s_.rule) {
      case SamplingRule::serial: out.push_back(trees_[0].sample(rng)); break;
      case SamplingRule::tau_nice:
        partial_shuffle(rng, s_.tau);
        out.assign(perm_.begin(), perm_.begin() + static_cast<std::ptrdiff_t>(s_.tau));
        std::sort(out.begin(), out.end());
        break;
      case SamplingRule::bucket:
        for (std::size_t l = 0; l < trees_.size(); ++l) out.push_back(s_.partition.groups[l][trees_[l].sample(rng)]);
        std::sort(out.begin(), out.end());
        break;
      case SamplingRule::chunked:
        partial_shuffle(rng, s_.tau);
        if (groups_out) groups_out->assign(perm_.begin(), perm_.begin() + static_cast<std::ptrdiff_t>(s_.tau));
        for (std::size_t k = 0; k < s_.tau; ++k)
          for (auto j : s_.partition.groups[perm_[k]]) out.push_back(j);
        std::sort(out.begin(), out.end());
        break;
    }
  }

 private:
  void partial_shuffle(Rng& rng, std::size_t k) {
    const std::size_t m = perm_.size();
    for (std::size_t i = 0; i < k; ++i) std::swap(perm_[i], perm_[i + rng.index(m - i)]);
  }

  Sampling s_;
  std::vector<ProbabilityTree> trees_;
  std::vector<std::size_t> perm_;
};

/// argmax_i grad_i^2 / m_ii, lowest index on ties.
inline std::size_t greedy_serial(std::span<const double> grad, std::span<const double> m_diag) {
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double s = grad[i] * grad[i] / m_diag[i];
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return best;
}

/// Indices of the tau largest scores (lowest index on ties), ascending.
inline std::vector<std::size_t> top_tau(std::span<const double> scores, std::size_t tau) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  idx.resize(std::min(tau, idx.size()));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace ascd
