#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "ascd/error.hpp"

namespace ascd {

enum class RegKind { none, l2, l1, box };

/// Separable regularizer r(w) = sum_i r_i(w_i).
///   l2:  weight * x^2 / 2
///   l1:  weight * |x|
///   box: indicator of |x| <= bound
struct Regularizer {
  RegKind kind = RegKind::l2;
  double weight = 1.0;
  double bound = std::numeric_limits<double>::infinity();

  static Regularizer none() { return {RegKind::none, 0.0}; }
  static Regularizer l2(double weight = 1.0) { return {RegKind::l2, weight}; }
  static Regularizer l1(double weight = 1.0) { return {RegKind::l1, weight}; }
  static Regularizer box(double b) {
    if (!(b > 0.0)) throw InvalidArgument("box bound must be positive");
    return {RegKind::box, 0.0, b};
  }

  bool strongly_convex() const { return kind == RegKind::l2 && weight > 0.0; }

  double value_1d(double x) const {
    switch (kind) {
      case RegKind::none: return 0.0;
      case RegKind::l2: return 0.5 * weight * x * x;
      case RegKind::l1: return weight * std::abs(x);
      // x + prox_step(x) can land an ulp outside the box.
      case RegKind::box: return std::abs(x) <= bound * (1.0 + 1e-12) ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return 0.0;
  }

  double value(std::span<const double> x) const {
    double s = 0.0;
    for (double v : x) s += value_1d(v);
    return s;
  }

  /// Conjugate r_i*(a).
  double conj_1d(double a) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (kind) {
      case RegKind::none: return a == 0.0 ? 0.0 : inf;
      case RegKind::l2: return 0.5 * a * a / weight;
      case RegKind::l1: return std::abs(a) <= weight ? 0.0 : inf;
      case RegKind::box: return bound * std::abs(a);
    }
    return 0.0;
  }

  double conj(std::span<const double> a) const {
    double s = 0.0;
    for (double v : a) s += conj_1d(v);
    return s;
  }

  /// argmin_u grad*u + (L/2) u^2 + r(x+u) - r(x).
  double prox_step(double x, double grad, double L) const {
    if (!(L > 0.0)) throw InvalidArgument("prox step needs L > 0");
    switch (kind) {
      case RegKind::none: return -grad / L;
      case RegKind::l2: return -(grad + weight * x) / (L + weight);
      case RegKind::l1: {
        const double t = x - grad / L;
        const double k = weight / L;
        const double s = t > k ? t - k : (t < -k ? t + k : 0.0);
        return s - x;
      }
      case RegKind::box: return std::clamp(x - grad / L, -bound, bound) - x;
    }
    return 0.0;
  }
};

inline std::string to_string(RegKind k) {
  switch (k) {
    case RegKind::none: return "none";
    case RegKind::l2: return "l2";
    case RegKind::l1: return "l1";
    case RegKind::box: return "box";
  }
  return "?";
}

/// Scalar form used by coordinate methods: prox of regularizer `reg` at x_i.
inline double reg_prox_1d(const Regularizer& reg, double x_i, double grad_i, double L) {
  return reg.prox_step(x_i, grad_i, L);
}

}  // namespace ascd
