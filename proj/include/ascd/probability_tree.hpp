#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ascd/error.hpp"
#include "ascd/rng.hpp"

namespace ascd {

/// Complete binary tree of subtree sums over nonnegative leaf weights.
/// Sampling and single-weight updates cost O(log n).
class ProbabilityTree {
 public:
  ProbabilityTree() = default;

  explicit ProbabilityTree(std::span<const double> weights) { build(weights); }

  void build(std::span<const double> weights) {
    n_ = weights.size();
    if (n_ == 0) throw InvalidArgument("probability tree needs at least one weight");
    cap_ = 1;
    while (cap_ < n_) cap_ *= 2;
    sums_.assign(2 * cap_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      check_weight(weights[i]);
      sums_[cap_ + i] = weights[i];
    }
    for (std::size_t k = cap_ - 1; k >= 1; --k) sums_[k] = sums_[2 * k] + sums_[2 * k + 1];
    ops_ += 2 * cap_;
    if (!(total() > 0.0)) throw InvalidArgument("probability tree needs a positive total weight");
  }

  std::size_t size() const noexcept { return n_; }
  double total() const noexcept { return sums_[1]; }
  double weight(std::size_t i) const { return sums_[cap_ + i]; }
  double probability(std::size_t i) const { return weight(i) / total(); }

  void update(std::size_t i, double w) {
    check_weight(w);
    std::size_t k = cap_ + i;
    sums_[k] = w;
    for (k /= 2; k >= 1; k /= 2) {
      sums_[k] = sums_[2 * k] + sums_[2 * k + 1];
      ++ops_;
    }
    if (!(total() > 0.0)) throw InvalidArgument("probability tree total weight became zero");
  }

  /// Index i with probability weight(i) / total(); zero-weight leaves are never returned.
  std::size_t sample(Rng& rng) {
    double u = rng.uniform() * total();
    std::size_t k = 1;
    while (k < cap_) {
      const double left = sums_[2 * k];
      const double right = sums_[2 * k + 1];
      ++ops_;
      if ((u < left && left > 0.0) || right <= 0.0) {
        k = 2 * k;
      } else {
        u -= left;
        k = 2 * k + 1;
      }
    }
    return k - cap_;
  }

  /// Count of node visits, for cost accounting.
  std::size_t operations() const noexcept { return ops_; }

 private:
  static void check_weight(double w) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("probability tree weights must be finite and >= 0");
  }

  std::size_t n_ = 0;
  std::size_t cap_ = 1;
  std::vector<double> sums_;
  std::size_t ops_ = 0;
};

}  // namespace ascd
