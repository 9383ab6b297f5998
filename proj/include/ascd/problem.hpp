#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "ascd/dataset.hpp"
#include "ascd/error.hpp"
#include "ascd/losses.hpp"
#include "ascd/regularizers.hpp"

namespace ascd {

/// P(w) = (1/n) sum_j phi(<X_:j, w>, y_j) + lambda r(w).
struct Problem {
  std::shared_ptr<const Dataset> data;
  Loss loss;
  Regularizer reg = Regularizer::l2();
  double lambda = 1.0;

  Problem() = default;
  Problem(std::shared_ptr<const Dataset> ds, Loss l, Regularizer r, double lam)
      : data(std::move(ds)), loss(l), reg(r), lambda(lam) {
    validate();
  }
  Problem(Dataset ds, Loss l, Regularizer r, double lam)
      : Problem(std::make_shared<const Dataset>(std::move(ds)), l, r, lam) {}

  const SparseMatrix& X() const { return data->X; }
  const std::vector<double>& y() const { return data->y; }
  std::size_t n() const { return data->n(); }
  std::size_t d() const { return data->d(); }
  double nlg() const { return static_cast<double>(n()) * lambda * loss.gamma; }

  void validate() const {
    if (!data) throw InvalidArgument("problem without data");
    data->validate();
    if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
    if (loss.needs_binary_labels() && !data->binary_labels())
      throw InvalidArgument(to_string(loss.kind) + " loss needs labels in {-1, 1}");
  }

  void require_l2() const {
    if (reg.kind != RegKind::l2 || reg.weight != 1.0)
      throw InvalidArgument("dual methods need the unit L2 regularizer");
  }
};

inline double primal_value_from_margins(const Problem& p, std::span<const double> margins, std::span<const double> w) {
  const auto& y = p.y();
  double s = 0.0;
  for (std::size_t j = 0; j < p.n(); ++j) s += loss_value(p.loss, margins[j], y[j]);
  return s / static_cast<double>(p.n()) + p.lambda * p.reg.value(w);
}

inline double primal_value(const Problem& p, std::span<const double> w) {
  const auto z = p.X().transpose_times(w);
  return primal_value_from_margins(p, z, w);
}

/// D(alpha) = -lambda r*((1/(lambda n)) X alpha) - (1/n) sum_j phi*(-alpha_j).
inline double dual_value(const Problem& p, std::span<const double> alpha) {
  const double n = static_cast<double>(p.n());
  auto abar = p.X().times(alpha);
  for (auto& v : abar) v /= p.lambda * n;
  const auto& y = p.y();
  double s = 0.0;
  for (std::size_t j = 0; j < p.n(); ++j) s += loss_conj(p.loss, alpha[j], y[j]);
  return -p.lambda * p.reg.conj(abar) - s / n;
}

inline double duality_gap(const Problem& p, std::span<const double> w, std::span<const double> alpha) {
  return primal_value(p, w) - dual_value(p, alpha);
}

/// w = (1/(lambda n)) X alpha, the primal point paired with alpha under L2.
inline std::vector<double> primal_from_dual(const Problem& p, std::span<const double> alpha) {
  auto w = p.X().times(alpha);
  for (auto& v : w) v /= p.lambda * static_cast<double>(p.n());
  return w;
}

/// kappa_j = alpha_j + phi'(<X_:j, w>).
inline std::vector<double> residues(const Problem& p, std::span<const double> w, std::span<const double> alpha) {
  std::vector<double> k(p.n());
  for (std::size_t j = 0; j < p.n(); ++j) k[j] = alpha[j] + loss_deriv(p.loss, p.X().col_dot(j, w), p.y()[j]);
  return k;
}

}  // namespace ascd
