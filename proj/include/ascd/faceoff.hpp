#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <tuple>
#include <utility>
#include <string>
#include <vector>

#include "ascd/dataset.hpp"
#include "ascd/eso.hpp"
#include "ascd/error.hpp"
#include "ascd/sampling.hpp"
#include "ascd/sparse_matrix.hpp"

namespace ascd {

/// sum_i ||X_i:||_0 ||X_i:||^2
inline double c_p(const SparseMatrix& X) {
  const auto s = row_stats(X);
  double c = 0.0;
  for (std::size_t i = 0; i < s.nnz.size(); ++i) c += static_cast<double>(s.nnz[i]) * s.norms_sq[i];
  return c;
}

/// sum_j ||X_:j||_0 ||X_:j||^2
inline double c_d(const SparseMatrix& X) {
  const auto s = col_stats(X);
  double c = 0.0;
  for (std::size_t j = 0; j < s.nnz.size(); ++j) c += static_cast<double>(s.nnz[j]) * s.norms_sq[j];
  return c;
}

enum class Side { primal, dual };
enum class SerialKind { uniform, importance };

inline std::string to_string(Side s) { return s == Side::primal ? "primal" : "dual"; }
inline std::string to_string(SerialKind k) { return k == SerialKind::uniform ? "uniform" : "importance"; }

struct FaceoffReport {
  double C_P = 0.0, C_D = 0.0;
  double W_P = 0.0, W_D = 0.0;  // expected nonzeros per iteration
  double K_P = 0.0, K_D = 0.0;  // iteration counts without the log factor
  double T_P = 0.0, T_D = 0.0;
  double ratio = 0.0;  // T_P / T_D
  Side recommended = Side::primal;
  SerialKind sampling = SerialKind::importance;
};

/// p proportional to s_i + nlg, with s the row (primal) or column (dual) squared norms.
inline std::vector<double> optimal_serial_probs(const SparseMatrix& X, double lambda, double gamma, Side side) {
  const double nlg = static_cast<double>(X.cols()) * lambda * gamma;
  return importance_probs(side == Side::primal ? u_serial(X) : v_serial(X), nlg);
}

/// K = max_i (s_i + nlg) / (p_i nlg) and W = sum_i p_i nnz_i for serial probabilities p.
inline std::pair<double, double> serial_complexity(std::span<const double> s, std::span<const std::size_t> nnz,
                                                   std::span<const double> p, double nlg) {
  double K = 0.0, W = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    K = std::max(K, (s[i] + nlg) / (p[i] * nlg));
    W += p[i] * static_cast<double>(nnz[i]);
  }
  return {K, W};
}

/// Total work T = K W of primal coordinate descent versus dual coordinate ascent.
inline FaceoffReport total_complexities(const SparseMatrix& X, double lambda, double gamma, SerialKind kind) {
  const std::size_t d = X.rows(), n = X.cols();
  if (d == 0 || n == 0) throw InvalidArgument("complexities of an empty matrix");
  const Dataset probe{X, std::vector<double>(n, 1.0)};
  if (!probe.empty_rows().empty() || !probe.empty_columns().empty())
    throw InvalidArgument("primal/dual comparison needs a matrix without zero rows or columns");
  const double nlg = static_cast<double>(n) * lambda * gamma;
  const auto rs = row_stats(X);
  const auto cs = col_stats(X);
  std::vector<double> p, q;
  if (kind == SerialKind::uniform) {
    p.assign(d, 1.0 / static_cast<double>(d));
    q.assign(n, 1.0 / static_cast<double>(n));
  } else {
    p = importance_probs(rs.norms_sq, nlg);
    q = importance_probs(cs.norms_sq, nlg);
  }
  FaceoffReport r;
  r.sampling = kind;
  r.C_P = c_p(X);
  r.C_D = c_d(X);
  std::tie(r.K_P, r.W_P) = serial_complexity(rs.norms_sq, rs.nnz, p, nlg);
  std::tie(r.K_D, r.W_D) = serial_complexity(cs.norms_sq, cs.nnz, q, nlg);
  r.T_P = r.K_P * r.W_P;
  r.T_D = r.K_D * r.W_D;
  r.ratio = r.T_P / r.T_D;
  r.recommended = r.T_P <= r.T_D ? Side::primal : Side::dual;
  return r;
}

/// Importance-sampling totals from summary statistics:
/// T_P = nnz + C_P / (n lambda gamma), T_D = nnz + C_D / (n lambda gamma).
inline FaceoffReport total_complexities_from_summary(double n, double nnz, double C_P, double C_D, double lambda,
                                                     double gamma) {
  const double nlg = n * lambda * gamma;
  FaceoffReport r;
  r.C_P = C_P;
  r.C_D = C_D;
  r.T_P = nnz + C_P / nlg;
  r.T_D = nnz + C_D / nlg;
  r.ratio = r.T_P / r.T_D;
  r.recommended = r.T_P <= r.T_D ? Side::primal : Side::dual;
  return r;
}

/// b * floor(a / b)
inline std::int64_t floor_to_multiple(std::int64_t a, std::int64_t b) { return b * (a / b); }

/// (1/n)(abar^2 + (alpha - abar)(2 abar + n)) with abar = n floor(alpha/n).
inline std::int64_t binary_L(std::int64_t alpha, std::int64_t n) {
  const std::int64_t ab = floor_to_multiple(alpha, n);
  const std::int64_t num = ab * ab + (alpha - ab) * (2 * ab + n);
  if (num % n != 0) throw Error("binary lower bound is not integral");
  return num / n;
}

/// (q+1) bar(alpha-p)_{q-1} + p - 1 + [alpha - p + 1 - bar(alpha-p)_{q-1}]^2.
inline std::int64_t binary_U(std::int64_t alpha, std::int64_t p, std::int64_t q) {
  if (q == 1) return alpha;
  const std::int64_t b = floor_to_multiple(alpha - p, q - 1);
  const std::int64_t r = alpha - p + 1 - b;
  return (q + 1) * b + p - 1 + r * r;
}

struct BinaryBounds {
  std::int64_t L_n = 0;   // L(alpha, n)   = min C_D
  std::int64_t L_d = 0;   // L(alpha, d)   = min C_P
  std::int64_t U_nd = 0;  // U(alpha, n, d) = max C_D
  std::int64_t U_dn = 0;  // U(alpha, d, n) = max C_P
  double R_dn = 0.0;      // U(alpha, d, n) / L(alpha, n): upper bound on C_P / C_D
  double R_nd = 0.0;      // U(alpha, n, d) / L(alpha, d): upper bound on C_D / C_P
};

inline void check_binary_range(std::int64_t alpha, std::int64_t d, std::int64_t n) {
  if (d < 1 || n < 1) throw InvalidArgument("binary bounds need d, n >= 1");
  if (alpha < std::max(d, n) || alpha > d * n)
    throw InvalidArgument("alpha must satisfy max(d, n) <= alpha <= d n");
}

inline BinaryBounds binary_bounds(std::int64_t alpha, std::int64_t d, std::int64_t n) {
  check_binary_range(alpha, d, n);
  BinaryBounds b;
  b.L_n = binary_L(alpha, n);
  b.L_d = binary_L(alpha, d);
  b.U_nd = binary_U(alpha, n, d);
  b.U_dn = binary_U(alpha, d, n);
  b.R_dn = static_cast<double>(b.U_dn) / static_cast<double>(b.L_n);
  b.R_nd = static_cast<double>(b.U_nd) / static_cast<double>(b.L_d);
  return b;
}

struct RegimeReport {
  bool primal_can_win = false;       // d <= n <= d^2/4 - 3d/2 - 1: some X has C_P < C_D
  bool dual_can_win = false;         // n <= d <= n^2/4 - 3n/2 - 1: some X has C_D < C_P
  bool primal_never_worse = false;   // d >= n and alpha >= n^2 + 3n: C_P <= C_D
  bool dual_never_worse = false;     // n >= d and alpha >= d^2 + 3d: C_D <= C_P
  bool primal_always_shape = false;  // d >= n^2 + 3n: C_P <= C_D for every X
  bool dual_always_shape = false;    // n >= d^2 + 3d: C_D <= C_P for every X
  BinaryBounds bounds;
};

inline RegimeReport check_regime_theorems(std::int64_t d, std::int64_t n, std::int64_t alpha) {
  RegimeReport r;
  r.bounds = binary_bounds(alpha, d, n);
  const double dd = static_cast<double>(d), nn = static_cast<double>(n);
  r.primal_can_win = d <= n && nn <= dd * dd / 4.0 - 1.5 * dd - 1.0;
  r.dual_can_win = n <= d && dd <= nn * nn / 4.0 - 1.5 * nn - 1.0;
  r.primal_never_worse = d >= n && alpha >= n * n + 3 * n;
  r.dual_never_worse = n >= d && alpha >= d * d + 3 * d;
  r.primal_always_shape = d >= n * n + 3 * n;
  r.dual_always_shape = n >= d * d + 3 * d;
  return r;
}

/// Column 1 holds a below the corner, row 1 holds b right of the corner, corner c.
inline SparseMatrix worst_case_general(std::size_t d, std::size_t n, double a, double b, double c) {
  if (a == 0.0 || b == 0.0 || c == 0.0) throw InvalidArgument("worst-case entries must be nonzero");
  std::vector<Triplet> t;
  t.push_back({0, 0, c});
  for (std::size_t i = 1; i < d; ++i) t.push_back({i, 0, a});
  for (std::size_t j = 1; j < n; ++j) t.push_back({0, j, b});
  return SparseMatrix::from_triplets(d, n, std::move(t));
}

/// Binary matrix with alpha ones attaining max C_P and min C_D together:
/// row counts follow the max-C_P pattern (full rows, one partial row, the
/// rest singletons); each row fills the currently least loaded columns.
inline SparseMatrix worst_case_binary(std::size_t d, std::size_t n, std::int64_t alpha) {
  const auto D = static_cast<std::int64_t>(d), N = static_cast<std::int64_t>(n);
  check_binary_range(alpha, D, N);
  std::vector<std::int64_t> counts;
  if (N == 1) {
    counts.assign(d, 1);
  } else {
    const std::int64_t full = (alpha - D) / (N - 1);
    const std::int64_t partial = alpha - D + 1 - floor_to_multiple(alpha - D, N - 1);
    for (std::int64_t k = 0; k < full && static_cast<std::int64_t>(counts.size()) < D; ++k) counts.push_back(N);
    if (static_cast<std::int64_t>(counts.size()) < D) counts.push_back(partial);
    while (static_cast<std::int64_t>(counts.size()) < D) counts.push_back(1);
  }
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return counts[x] > counts[y]; });
  std::vector<std::int64_t> load(n, 0);
  std::vector<Triplet> t;
  std::vector<std::size_t> cols(n);
  for (auto i : order) {
    std::iota(cols.begin(), cols.end(), 0);
    std::stable_sort(cols.begin(), cols.end(), [&](std::size_t x, std::size_t y) { return load[x] < load[y]; });
    for (std::int64_t k = 0; k < counts[i]; ++k) {
      t.push_back({i, cols[static_cast<std::size_t>(k)], 1.0});
      ++load[cols[static_cast<std::size_t>(k)]];
    }
  }
  return SparseMatrix::from_triplets(d, n, std::move(t));
}

}  // namespace ascd
