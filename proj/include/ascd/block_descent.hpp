#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ascd/combinatorics.hpp"
#include "ascd/error.hpp"
#include "ascd/eso.hpp"
#include "ascd/probability_tree.hpp"
#include "ascd/regularizers.hpp"
#include "ascd/rng.hpp"
#include "ascd/trace.hpp"

namespace ascd {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Composite objective F = f + g with M-smooth f and separable g (lambda folded into g).
struct Objective {
  std::string name;
  std::size_t dim = 0;
  std::function<double(const Vec&)> f;
  std::function<Vec(const Vec&)> grad;
  Mat M;
  Regularizer g = Regularizer::none();
  std::optional<double> f_star;  // optimal value of F
  std::optional<Vec> x_star;

  bool smooth() const { return g.kind == RegKind::none; }

  double g_value(const Vec& x) const { return g.value(std::span<const double>(x.data(), static_cast<std::size_t>(x.size()))); }
  double F(const Vec& x) const { return f(x) + g_value(x); }

  Vec block_gradient(const Vec& x, std::span<const std::size_t> S) const {
    const Vec full = grad(x);
    Vec out(static_cast<Eigen::Index>(S.size()));
    for (std::size_t k = 0; k < S.size(); ++k) out(static_cast<Eigen::Index>(k)) = full(static_cast<Eigen::Index>(S[k]));
    return out;
  }

  void validate() const {
    if (dim == 0) throw InvalidArgument("objective has dimension zero");
    if (!f || !grad) throw InvalidArgument("objective is missing f or its gradient");
    if (M.rows() != static_cast<Eigen::Index>(dim) || M.cols() != static_cast<Eigen::Index>(dim))
      throw InvalidArgument("smoothness matrix has the wrong shape");
    Eigen::LLT<Mat> llt(M);
    if (llt.info() != Eigen::Success) throw InvalidArgument("smoothness matrix is not positive definite");
  }
};

namespace detail {

inline Mat principal(const Mat& M, std::span<const std::size_t> S) {
  const auto k = static_cast<Eigen::Index>(S.size());
  Mat out(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b)
      out(a, b) = M(static_cast<Eigen::Index>(S[static_cast<std::size_t>(a)]), static_cast<Eigen::Index>(S[static_cast<std::size_t>(b)]));
  return out;
}

inline Vec gather(const Vec& v, std::span<const std::size_t> S) {
  Vec out(static_cast<Eigen::Index>(S.size()));
  for (std::size_t k = 0; k < S.size(); ++k) out(static_cast<Eigen::Index>(k)) = v(static_cast<Eigen::Index>(S[k]));
  return out;
}

/// g_S^T M_S^{-1} g_S
inline double block_quadratic(const Mat& M, const Vec& grad, std::span<const std::size_t> S) {
  const Vec gs = gather(grad, S);
  Eigen::LLT<Mat> llt(principal(M, S));
  if (llt.info() != Eigen::Success) throw NumericalError("principal submatrix is not positive definite");
  return gs.dot(llt.solve(gs));
}

inline double lambda_max(const Mat& M) {
  return Eigen::SelfAdjointEigenSolver<Mat>(M, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
}

inline double lambda_min(const Mat& M) {
  return Eigen::SelfAdjointEigenSolver<Mat>(M, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

}  // namespace detail

/// lambda_i(x) = -L min_v { grad_i v + (L/2) v^2 + g_i(x_i + v) - g_i(x_i) }.
inline std::vector<double> forcing_lambda_coords(const Objective& obj, const Vec& x, const Vec& grad, double L) {
  std::vector<double> lam(obj.dim);
  for (std::size_t i = 0; i < obj.dim; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double gi = grad(ii);
    if (obj.smooth()) {
      lam[i] = 0.5 * gi * gi;
      continue;
    }
    const double u = reg_prox_1d(obj.g, x(ii), gi, L);
    const double model = gi * u + 0.5 * L * u * u + obj.g.value_1d(x(ii) + u) - obj.g.value_1d(x(ii));
    lam[i] = std::max(0.0, -L * model);
  }
  return lam;
}

inline std::vector<double> forcing_lambda_coords(const Objective& obj, const Vec& x, double L) {
  return forcing_lambda_coords(obj, x, obj.grad(x), L);
}

inline double forcing_lambda(const Objective& obj, const Vec& x, double L) {
  const auto lam = forcing_lambda_coords(obj, x, L);
  return std::accumulate(lam.begin(), lam.end(), 0.0);
}

/// mu(x) = lambda(x) / xi(x); empty when F* is unknown or xi(x) <= 0.
inline std::optional<double> forcing_mu(const Objective& obj, const Vec& x, double L) {
  if (!obj.f_star) return std::nullopt;
  const double xi = obj.F(x) - *obj.f_star;
  if (!(xi > 0.0)) return std::nullopt;
  return forcing_lambda(obj, x, L) / xi;
}

/// Smooth form g_S^T M_S^{-1} g_S / ||g||^2; 0 when the gradient vanishes.
inline double proportion_theta_smooth(const Mat& M, const Vec& grad, std::span<const std::size_t> S) {
  const double denom = grad.squaredNorm();
  if (denom == 0.0) return 0.0;
  return detail::block_quadratic(M, grad, S) / denom;
}

/// Nonsmooth form sum_{i in S} lambda_i / (L sum_j lambda_j); 0 when lambda = 0.
inline double proportion_theta_prox(std::span<const double> lam, std::span<const std::size_t> S, double L) {
  const double total = std::accumulate(lam.begin(), lam.end(), 0.0);
  if (total == 0.0) return 0.0;
  double part = 0.0;
  for (auto i : S) part += lam[i];
  return part / (L * total);
}

inline double proportion_theta(const Objective& obj, const Vec& x, std::span<const std::size_t> S, double L) {
  const Vec grad = obj.grad(x);
  if (obj.smooth()) return proportion_theta_smooth(obj.M, grad, S);
  return proportion_theta_prox(forcing_lambda_coords(obj, x, grad, L), S, L);
}

enum class BlockRuleKind { full_batch, serial_uniform, serial_importance, serial_greedy, tau_nice, greedy_minibatch };

inline std::string to_string(BlockRuleKind k) {
  switch (k) {
    case BlockRuleKind::full_batch: return "full_batch";
    case BlockRuleKind::serial_uniform: return "serial_uniform";
    case BlockRuleKind::serial_importance: return "serial_importance";
    case BlockRuleKind::serial_greedy: return "serial_greedy";
    case BlockRuleKind::tau_nice: return "tau_nice";
    case BlockRuleKind::greedy_minibatch: return "greedy_minibatch";
  }
  return "?";
}

struct BlockRule {
  BlockRuleKind kind = BlockRuleKind::serial_uniform;
  std::size_t tau = 1;
  std::optional<double> L;  // nonsmooth model constant; defaults to L_tau of M

  static BlockRule full_batch() { return {BlockRuleKind::full_batch, 0, {}}; }
  static BlockRule serial_uniform() { return {BlockRuleKind::serial_uniform, 1, {}}; }
  static BlockRule serial_importance() { return {BlockRuleKind::serial_importance, 1, {}}; }
  static BlockRule serial_greedy() { return {BlockRuleKind::serial_greedy, 1, {}}; }
  static BlockRule tau_nice(std::size_t t) { return {BlockRuleKind::tau_nice, t, {}}; }
  static BlockRule greedy_minibatch(std::size_t t) { return {BlockRuleKind::greedy_minibatch, t, {}}; }

  std::size_t block_size(std::size_t n) const {
    switch (kind) {
      case BlockRuleKind::full_batch: return n;
      case BlockRuleKind::tau_nice:
      case BlockRuleKind::greedy_minibatch: return tau;
      default: return 1;
    }
  }

  void validate(std::size_t n) const {
    if ((kind == BlockRuleKind::tau_nice || kind == BlockRuleKind::greedy_minibatch) && (tau == 0 || tau > n))
      throw InvalidArgument("minibatch size must satisfy 1 <= tau <= n");
    if (L && !(*L > 0.0)) throw InvalidArgument("model constant L must be positive");
  }
};

/// Model constant of the nonsmooth step: the override, or L_tau of M for the rule's block size.
inline double rule_L(const Objective& obj, const BlockRule& rule) {
  if (rule.L) return *rule.L;
  return L_tau(obj.M, rule.block_size(obj.dim)).value;
}

/// E[M_[S]^{-1}] for tau-nice sampling, by enumerating all tau-subsets.
inline Mat expected_block_inverse(const Mat& M, std::size_t tau) {
  const auto n = static_cast<std::size_t>(M.rows());
  if (tau == 0 || tau > n) throw InvalidArgument("expected block inverse needs 1 <= tau <= n");
  const std::size_t count = binomial(n, tau);
  if (count > 1000000) throw InvalidArgument("too many subsets to enumerate");
  Mat E = Mat::Zero(M.rows(), M.cols());
  for_each_subset(n, tau, [&](const std::vector<std::size_t>& S) {
    const Mat inv = detail::principal(M, S).inverse();
    for (std::size_t a = 0; a < tau; ++a)
      for (std::size_t b = 0; b < tau; ++b)
        E(static_cast<Eigen::Index>(S[a]), static_cast<Eigen::Index>(S[b])) +=
            inv(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  });
  return E / static_cast<double>(count);
}

/// Iterate-independent lower bound c on (expected) proportion for a rule.
inline double proportion_constant(const Objective& obj, const BlockRule& rule) {
  const auto n = static_cast<double>(obj.dim);
  const Mat& M = obj.M;
  if (!obj.smooth()) {
    const double L = rule_L(obj, rule);
    switch (rule.kind) {
      case BlockRuleKind::full_batch: return 1.0 / L;
      case BlockRuleKind::tau_nice:
      case BlockRuleKind::greedy_minibatch: return static_cast<double>(rule.tau) / (n * L);
      default: return 1.0 / (n * L);
    }
  }
  switch (rule.kind) {
    case BlockRuleKind::full_batch: return 1.0 / detail::lambda_max(M);
    case BlockRuleKind::serial_uniform: return 1.0 / (n * M.diagonal().maxCoeff());
    case BlockRuleKind::serial_importance:
    case BlockRuleKind::serial_greedy: return 1.0 / M.diagonal().sum();
    case BlockRuleKind::tau_nice:
    case BlockRuleKind::greedy_minibatch: return detail::lambda_min(expected_block_inverse(M, rule.tau));
  }
  return 0.0;
}

struct BlockBudget {
  std::size_t max_iterations = 1000;
  double target_xi = 0.0;  // stop once F - F* <= target; 0 disables
  std::size_t greedy_enumeration_limit = 100000;
};

struct BlockOptions {
  BlockBudget budget;
  Vec x0;  // empty means zero
  std::function<void(std::size_t, const Vec&)> on_iteration;
};

struct BlockResult {
  Trace trace;
  Vec x;
  double max_lemma_violation = 0.0;  // max_k F(x^{k+1}) - F(x^k) + theta_k lambda(x^k)
};

namespace detail {

inline std::vector<std::size_t> top_indices(std::span<const double> score, std::size_t tau) {
  std::vector<std::size_t> idx(score.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  idx.resize(tau);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace detail

/// Exact argmax over tau-subsets of g_S^T M_S^{-1} g_S (ties to the first in lexicographic order).
inline std::vector<std::size_t> greedy_block_exact(const Mat& M, const Vec& grad, std::size_t tau) {
  std::vector<std::size_t> best;
  double best_val = -1.0;
  for_each_subset(static_cast<std::size_t>(M.rows()), tau, [&](const std::vector<std::size_t>& S) {
    const double v = detail::block_quadratic(M, grad, S);
    if (v > best_val) {
      best_val = v;
      best = S;
    }
  });
  return best;
}

/// Proximal arbitrary-block descent. Each logged row k holds F(x^k) in `primal`,
/// F(x^k) - F* in `gap` (when F* is known), lambda(x^k) and theta(S_k, x^k).
inline BlockResult block_descent_run(const Objective& obj, const BlockRule& rule, const BlockOptions& opt, Rng& rng) {
  obj.validate();
  const std::size_t n = obj.dim;
  rule.validate(n);
  const bool smooth = obj.smooth();
  const double L = smooth ? kNaN : rule_L(obj, rule);
  const double lam_L = smooth ? 1.0 : L;

  BlockResult res;
  Trace& t = res.trace;
  t.info["method"] = "block_descent";
  t.info["rule"] = to_string(rule.kind);
  if (!smooth) t.info["L"] = std::to_string(L);

  Vec x = opt.x0.size() == 0 ? Vec::Zero(static_cast<Eigen::Index>(n)) : opt.x0;
  if (static_cast<std::size_t>(x.size()) != n) throw InvalidArgument("initial point has the wrong length");

  Eigen::LLT<Mat> full_llt;
  if (smooth && rule.kind == BlockRuleKind::full_batch) {
    full_llt.compute(obj.M);
    if (full_llt.info() != Eigen::Success) throw NumericalError("smoothness matrix factorization failed");
  }
  ProbabilityTree imp_tree;
  if (rule.kind == BlockRuleKind::serial_importance) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = smooth ? obj.M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) : 1.0;
    imp_tree.build(w);
  }
  const bool exact_greedy = rule.kind == BlockRuleKind::greedy_minibatch && smooth &&
                            binomial(n, rule.tau) <= opt.budget.greedy_enumeration_limit;
  if (rule.kind == BlockRuleKind::greedy_minibatch && smooth && !exact_greedy)
    t.info["greedy"] = "heuristic top-tau by grad_i^2 / M_ii";

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::size_t> pool(all);
  std::vector<std::size_t> S;
  double coords = 0.0;
  Stopwatch clock;

  Vec grad = obj.grad(x);
  double Fx = obj.F(x);
  auto lam = forcing_lambda_coords(obj, x, grad, lam_L);

  auto choose = [&]() {
    S.clear();
    switch (rule.kind) {
      case BlockRuleKind::full_batch: S = all; break;
      case BlockRuleKind::serial_uniform: S.push_back(rng.index(n)); break;
      case BlockRuleKind::serial_importance: S.push_back(imp_tree.sample(rng)); break;
      case BlockRuleKind::serial_greedy: {
        std::vector<double> score(n);
        for (std::size_t i = 0; i < n; ++i) {
          const auto ii = static_cast<Eigen::Index>(i);
          score[i] = smooth ? grad(ii) * grad(ii) / obj.M(ii, ii) : lam[i];
        }
        S = detail::top_indices(score, 1);
        break;
      }
      case BlockRuleKind::tau_nice: {
        for (std::size_t k = 0; k < rule.tau; ++k) std::swap(pool[k], pool[k + rng.index(n - k)]);
        S.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(rule.tau));
        std::sort(S.begin(), S.end());
        break;
      }
      case BlockRuleKind::greedy_minibatch: {
        if (exact_greedy) {
          S = greedy_block_exact(obj.M, grad, rule.tau);
        } else {
          std::vector<double> score(n);
          for (std::size_t i = 0; i < n; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            score[i] = smooth ? grad(ii) * grad(ii) / obj.M(ii, ii) : lam[i];
          }
          S = detail::top_indices(score, rule.tau);
        }
        break;
      }
    }
  };

  for (std::size_t k = 0;; ++k) {
    const double lam_total = std::accumulate(lam.begin(), lam.end(), 0.0);
    TraceRow r;
    r.epoch = static_cast<double>(k);
    r.effective_passes = coords / static_cast<double>(n);
    r.wall_seconds = clock.seconds();
    r.simulated_parallel_cost = static_cast<double>(k);
    r.primal = Fx;
    r.gap = obj.f_star ? Fx - *obj.f_star : kNaN;
    r.lambda = lam_total;
    t.iterations = k;

    if (!std::isfinite(Fx)) {
      t.rows.push_back(r);
      t.status = "nonfinite";
      break;
    }
    if (lam_total == 0.0) {
      r.theta = 0.0;
      t.rows.push_back(r);
      t.status = "stationary";
      break;
    }
    if (opt.budget.target_xi > 0.0 && obj.f_star && r.gap <= opt.budget.target_xi) {
      t.rows.push_back(r);
      t.status = "target";
      break;
    }
    if (k == opt.budget.max_iterations) {
      t.rows.push_back(r);
      break;
    }

    choose();
    const double theta = smooth ? proportion_theta_smooth(obj.M, grad, S) : proportion_theta_prox(lam, S, L);
    r.theta = theta;
    t.rows.push_back(r);

    if (smooth) {
      if (rule.kind == BlockRuleKind::full_batch) {
        x -= full_llt.solve(grad);
      } else {
        Eigen::LLT<Mat> llt(detail::principal(obj.M, S));
        if (llt.info() != Eigen::Success) throw NumericalError("block factorization failed");
        const Vec u = llt.solve(detail::gather(grad, S));
        for (std::size_t a = 0; a < S.size(); ++a) x(static_cast<Eigen::Index>(S[a])) -= u(static_cast<Eigen::Index>(a));
      }
    } else {
      for (auto i : S) {
        const auto ii = static_cast<Eigen::Index>(i);
        x(ii) += reg_prox_1d(obj.g, x(ii), grad(ii), L);
      }
    }
    coords += static_cast<double>(S.size());

    const double F_next = obj.F(x);
    res.max_lemma_violation = std::max(res.max_lemma_violation, F_next - Fx + theta * lam_total);
    Fx = F_next;
    grad = obj.grad(x);
    lam = forcing_lambda_coords(obj, x, grad, lam_L);
    if (opt.on_iteration) opt.on_iteration(k + 1, x);
  }
  res.x = std::move(x);
  return res;
}

/// Largest one-step violation xi_{k+1} - (1 - theta_k mu_k) xi_k over consecutive rows of a trace.
inline double lemma_violation(const Trace& t) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < t.rows.size(); ++k) {
    const auto& a = t.rows[k];
    const auto& b = t.rows[k + 1];
    if (std::isnan(a.theta)) continue;
    double v;
    if (!std::isnan(a.gap) && a.gap > 0.0) {
      const double mu = a.lambda / a.gap;
      v = b.gap - (1.0 - a.theta * mu) * a.gap;
    } else {
      v = b.primal - a.primal + a.theta * a.lambda;
    }
    worst = std::max(worst, v);
  }
  return worst;
}

enum class PLClass { strongly_pl, weakly_pl, nonconvex };

struct TheoremBound {
  PLClass cls = PLClass::strongly_pl;
  double c = 0.0;    // proportion constant
  double mu = 0.0;   // strongly PL
  double rho = 0.0;  // weakly PL, rho(x0)
  double xi0 = 0.0;  // F(x0) - F*
};

/// Iteration counts: strongly PL ceil((1/(c mu)) log(xi0/eps)); weakly PL
/// ceil(1/(rho c eps)); nonconvex ceil((xi0/(c eps)) log(xi0/eps)).
inline std::size_t predicted_iterations(const TheoremBound& b, double eps) {
  if (!(b.c > 0.0)) throw InvalidArgument("proportion constant must be positive");
  if (!(eps > 0.0)) throw InvalidArgument("accuracy must be positive");
  double K = 0.0;
  switch (b.cls) {
    case PLClass::strongly_pl:
      if (!(b.mu > 0.0) || !(b.xi0 > 0.0)) throw InvalidArgument("strongly PL bound needs mu > 0 and xi0 > 0");
      K = std::log(b.xi0 / eps) / (b.c * b.mu);
      break;
    case PLClass::weakly_pl:
      if (!(b.rho > 0.0)) throw InvalidArgument("weakly PL bound needs rho > 0");
      K = 1.0 / (b.rho * b.c * eps);
      break;
    case PLClass::nonconvex:
      if (!(b.xi0 > 0.0)) throw InvalidArgument("nonconvex bound needs xi0 > 0");
      K = b.xi0 / (b.c * eps) * std::log(b.xi0 / eps);
      break;
  }
  if (K <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(K));
}

enum class TestObjectiveKind { quadratic, nonconvex_cosine, wpl_product, wpl_huber, plateau };

inline std::string to_string(TestObjectiveKind k) {
  switch (k) {
    case TestObjectiveKind::quadratic: return "quadratic";
    case TestObjectiveKind::nonconvex_cosine: return "nonconvex_cosine";
    case TestObjectiveKind::wpl_product: return "wpl_product";
    case TestObjectiveKind::wpl_huber: return "wpl_huber";
    case TestObjectiveKind::plateau: return "plateau";
  }
  return "?";
}

inline TestObjectiveKind parse_test_objective_kind(std::string_view s) {
  if (s == "quadratic") return TestObjectiveKind::quadratic;
  if (s == "nonconvex_cosine") return TestObjectiveKind::nonconvex_cosine;
  if (s == "wpl_product") return TestObjectiveKind::wpl_product;
  if (s == "wpl_huber") return TestObjectiveKind::wpl_huber;
  if (s == "plateau") return TestObjectiveKind::plateau;
  throw InvalidArgument("unknown test objective: " + std::string(s));
}

struct TestObjectiveSpec {
  TestObjectiveKind kind = TestObjectiveKind::quadratic;
  std::size_t n = 10;
  std::size_t m = 100;
  double lambda = 0.0;  // quadratic: L2 weight added to f; cosine: L1 weight
  Regularizer g = Regularizer::none();  // quadratic only
  std::uint64_t seed = 1;
};

/// Huber as printed: z^2 inside |z| < 1, 2|z| - 1 outside.
inline double huber(double z) { return std::abs(z) < 1.0 ? z * z : 2.0 * std::abs(z) - 1.0; }
inline double huber_deriv(double z) { return std::abs(z) < 1.0 ? 2.0 * z : (z > 0.0 ? 2.0 : -2.0); }

/// c with a flat inflection point of 0.5 (x - pi/c)^2 + cos(c x): c = cos(pi + s)^{-1/2}, tan s = s, s in (pi, 3pi/2).
inline double plateau_c() {
  double lo = std::numbers::pi + 1e-9, hi = 1.5 * std::numbers::pi - 1e-9;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::tan(mid) - mid < 0.0) lo = mid; else hi = mid;
  }
  const double s = 0.5 * (lo + hi);
  return 1.0 / std::sqrt(std::cos(std::numbers::pi + s));
}

namespace detail {

inline Mat random_orthonormal(std::size_t rows, std::size_t cols, Rng& rng) {
  Mat G(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < G.cols(); ++j)
    for (Eigen::Index i = 0; i < G.rows(); ++i) G(i, j) = rng.normal();
  Eigen::HouseholderQR<Mat> qr(G);
  return qr.householderQ() * Mat::Identity(G.rows(), G.cols());
}

inline Vec unit_gaussian(std::size_t n, Rng& rng) {
  Vec v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
  return v / v.norm();
}

/// f(x) = 0.5 x^T Q x - q^T x + c0 + (1/m) cos(<cv, x>), precomputed from A, b.
inline Objective cosine_least_squares(const Mat& A, const Vec& b, const Vec& cv, double m) {
  const Mat Q = A.transpose() * A / m;
  const Vec q = A.transpose() * b / m;
  const double c0 = b.squaredNorm() / (2.0 * m);
  Objective o;
  o.dim = static_cast<std::size_t>(A.cols());
  o.f = [Q, q, c0, cv, m](const Vec& x) { return 0.5 * x.dot(Q * x) - q.dot(x) + c0 + std::cos(cv.dot(x)) / m; };
  o.grad = [Q, q, cv, m](const Vec& x) -> Vec { return Q * x - q - (std::sin(cv.dot(x)) / m) * cv; };
  o.M = Q + (cv.squaredNorm() / m) * Mat::Identity(Q.rows(), Q.cols());
  return o;
}

}  // namespace detail

inline Objective make_test_objective(const TestObjectiveSpec& spec) {
  Rng rng(spec.seed);
  switch (spec.kind) {
    case TestObjectiveKind::quadratic: {
      // f = 0.5 x^T Q x - q^T x, Q = B^T B / n + lambda I + 0.1 I
      const std::size_t n = spec.n;
      if (n == 0) throw InvalidArgument("quadratic objective needs n >= 1");
      Rng r = rng.split("quadratic");
      Mat B(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      for (Eigen::Index j = 0; j < B.cols(); ++j)
        for (Eigen::Index i = 0; i < B.rows(); ++i) B(i, j) = r.normal();
      const Mat Q = B.transpose() * B / static_cast<double>(n) +
                    (spec.lambda + 0.1) * Mat::Identity(B.rows(), B.cols());
      Vec q(static_cast<Eigen::Index>(n));
      for (Eigen::Index i = 0; i < q.size(); ++i) q(i) = r.normal();
      Objective o;
      o.name = "quadratic";
      o.dim = n;
      o.f = [Q, q](const Vec& x) { return 0.5 * x.dot(Q * x) - q.dot(x); };
      o.grad = [Q, q](const Vec& x) -> Vec { return Q * x - q; };
      o.M = Q;
      o.g = spec.g;
      if (o.smooth()) {
        const Vec xs = Q.llt().solve(q);
        o.x_star = xs;
        o.f_star = -0.5 * q.dot(xs);
      }
      return o;
    }
    case TestObjectiveKind::nonconvex_cosine: {
      const std::size_t n = spec.n, m = spec.m;
      if (n == 0 || m < n) throw InvalidArgument("cosine objective needs 1 <= n <= m");
      Rng r = rng.split("cosine");
      const Mat U = detail::random_orthonormal(m, n, r);
      const Mat V = detail::random_orthonormal(n, n, r);
      Vec s(static_cast<Eigen::Index>(n));
      const double md = static_cast<double>(m);
      for (std::size_t i = 0; i < n; ++i)
        s(static_cast<Eigen::Index>(i)) =
            n == 1 ? 1.0 : 1.0 / md + (1.0 - 1.0 / md) * static_cast<double>(i) / static_cast<double>(n - 1);
      const Mat A = U * s.asDiagonal() * V.transpose();
      const Vec y = detail::unit_gaussian(n, r);
      const Vec cv = detail::unit_gaussian(n, r);
      Objective o = detail::cosine_least_squares(A, A * y, cv, md);
      o.name = "nonconvex_cosine";
      o.g = spec.lambda > 0.0 ? Regularizer::l1(spec.lambda) : Regularizer::none();
      return o;
    }
    case TestObjectiveKind::wpl_product: {
      Objective o;
      o.name = "wpl_product";
      o.dim = 2;
      o.f = [](const Vec& x) { return x(0) * x(0) * x(1) * x(1); };
      o.grad = [](const Vec& x) -> Vec {
        Vec gr(2);
        gr << 2.0 * x(0) * x(1) * x(1), 2.0 * x(0) * x(0) * x(1);
        return gr;
      };
      o.M = 150.0 * Mat::Identity(2, 2);  // valid on [-5, 5]^2
      o.f_star = 0.0;
      o.x_star = Vec::Zero(2);
      return o;
    }
    case TestObjectiveKind::wpl_huber: {
      Objective o;
      o.name = "wpl_huber";
      o.dim = 2;
      o.f = [](const Vec& x) { return huber(x(0)) * huber(x(1)); };
      o.grad = [](const Vec& x) -> Vec {
        Vec gr(2);
        gr << huber_deriv(x(0)) * huber(x(1)), huber(x(0)) * huber_deriv(x(1));
        return gr;
      };
      o.M = 22.0 * Mat::Identity(2, 2);  // valid on [-5, 5]^2
      o.f_star = 0.0;
      o.x_star = Vec::Zero(2);
      return o;
    }
    case TestObjectiveKind::plateau: {
      const double c = plateau_c();
      Mat A(1, 1);
      A << 1.0;
      Vec b(1), cv(1);
      b << std::numbers::pi / c;
      cv << c;
      Objective o = detail::cosine_least_squares(A, b, cv, 1.0);
      const auto base = o.f;
      o.f = [base](const Vec& x) { return base(x) + 1.0; };
      o.name = "plateau";
      o.f_star = 0.0;
      o.x_star = b;
      return o;
    }
  }
  throw InvalidArgument("unknown test objective");
}

inline Objective make_test_objective(std::string_view kind, std::uint64_t seed) {
  TestObjectiveSpec s;
  s.kind = parse_test_objective_kind(kind);
  s.seed = seed;
  return make_test_objective(s);
}

/// Largest f(x + h) - [f(x) + <grad, h> + 0.5 h^T M h] over random pairs in a box.
inline double check_smoothness(const Objective& obj, Rng& rng, std::size_t pairs = 200, double radius = 1.0) {
  double worst = -std::numeric_limits<double>::infinity();
  const auto n = static_cast<Eigen::Index>(obj.dim);
  Vec x(n), h(n);
  for (std::size_t k = 0; k < pairs; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      x(i) = radius * (2.0 * rng.uniform() - 1.0);
      h(i) = radius * (2.0 * rng.uniform() - 1.0) - x(i);
      h(i) *= rng.uniform();
    }
    const double model = obj.f(x) + obj.grad(x).dot(h) + 0.5 * h.dot(obj.M * h);
    worst = std::max(worst, obj.f(x + h) - model);
  }
  return worst;
}

/// Best of several full-batch proximal gradient runs from Gaussian starts.
struct ReferencePoint {
  Vec x;
  double F = 0.0;
};

inline ReferencePoint multistart_reference(const Objective& obj, std::size_t starts, std::size_t iterations,
                                           double scale, Rng& rng) {
  obj.validate();
  const double L = detail::lambda_max(obj.M);
  const auto n = static_cast<Eigen::Index>(obj.dim);
  ReferencePoint best{Vec::Zero(n), std::numeric_limits<double>::infinity()};
  for (std::size_t s = 0; s < starts; ++s) {
    Vec x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = scale * rng.normal();
    for (std::size_t it = 0; it < iterations; ++it) {
      const Vec gr = obj.grad(x);
      for (Eigen::Index i = 0; i < n; ++i) x(i) += reg_prox_1d(obj.g, x(i), gr(i), L);
    }
    const double F = obj.F(x);
    if (F < best.F) best = {x, F};
  }
  return best;
}

}  // namespace ascd
