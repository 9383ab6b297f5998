#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ascd/error.hpp"

namespace ascd {

enum class LossKind { quadratic, logistic, smoothed_hinge };

/// Loss phi(s) with 1/gamma-smooth derivative.
struct Loss {
  LossKind kind = LossKind::quadratic;
  double gamma = 1.0;

  static Loss quadratic() { return {LossKind::quadratic, 1.0}; }
  static Loss logistic() { return {LossKind::logistic, 4.0}; }
  static Loss smoothed_hinge(double g) {
    if (!(g > 0.0)) throw InvalidArgument("smoothed hinge needs gamma > 0");
    return {LossKind::smoothed_hinge, g};
  }

  bool needs_binary_labels() const { return kind != LossKind::quadratic; }
};

inline std::string to_string(LossKind k) {
  switch (k) {
    case LossKind::quadratic: return "quadratic";
    case LossKind::logistic: return "logistic";
    case LossKind::smoothed_hinge: return "smoothed_hinge";
  }
  return "?";
}

namespace detail {

inline void check_binary(const Loss& loss, double y) {
  if (loss.needs_binary_labels() && y != 1.0 && y != -1.0)
    throw InvalidArgument(to_string(loss.kind) + " loss needs labels in {-1, 1}");
}

// log(1 + exp(t)) without overflow.
inline double log1pexp(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace detail

inline double loss_value(const Loss& loss, double s, double y) {
  detail::check_binary(loss, y);
  switch (loss.kind) {
    case LossKind::quadratic: return 0.5 * (s - y) * (s - y);
    case LossKind::logistic: return detail::log1pexp(-y * s);
    case LossKind::smoothed_hinge: {
      const double m = s * y;
      if (m > 1.0) return 0.0;
      if (m < 1.0 - loss.gamma) return 1.0 - m - 0.5 * loss.gamma;
      return (1.0 - m) * (1.0 - m) / (2.0 * loss.gamma);
    }
  }
  return 0.0;
}

/// d phi / d s.
inline double loss_deriv(const Loss& loss, double s, double y) {
  detail::check_binary(loss, y);
  switch (loss.kind) {
    case LossKind::quadratic: return s - y;
    case LossKind::logistic: {
      const double t = y * s;
      // -y / (1 + exp(ys))
      return t > 0.0 ? -y * std::exp(-t) / (1.0 + std::exp(-t)) : -y / (1.0 + std::exp(t));
    }
    case LossKind::smoothed_hinge: {
      const double m = s * y;
      if (m > 1.0) return 0.0;
      if (m < 1.0 - loss.gamma) return -y;
      return -(1.0 - m) * y / loss.gamma;
    }
  }
  return 0.0;
}

/// phi*(-u); +inf outside the conjugate domain.
inline double loss_conj(const Loss& loss, double u, double y) {
  detail::check_binary(loss, y);
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (loss.kind) {
    case LossKind::quadratic: return -u * y + 0.5 * u * u;
    case LossKind::logistic: {
      const double b = u * y;
      if (b < 0.0 || b > 1.0) return inf;
      return detail::xlogx(b) + detail::xlogx(1.0 - b);
    }
    case LossKind::smoothed_hinge: {
      const double b = u * y;
      if (b < 0.0 || b > 1.0) return inf;
      return -b + 0.5 * loss.gamma * u * u;
    }
  }
  return 0.0;
}

/// Maximizer of -phi*(-(alpha+D)) - inner*D - (coeff/2) D^2.
/// The logistic loss has no closed form; it takes the damped step
/// D = -eta (phi'(inner) + alpha), which moves alpha towards -phi'(inner).
inline double dual_delta(const Loss& loss, double alpha, double inner, double coeff, double y, double eta = 0.0) {
  if (!(coeff > 0.0)) throw InvalidArgument("dual_delta needs coeff > 0");
  detail::check_binary(loss, y);
  switch (loss.kind) {
    case LossKind::quadratic: return (y - alpha - inner) / (1.0 + coeff);
    case LossKind::smoothed_hinge: {
      const double g = loss.gamma;
      const double raw = (y - g * alpha - inner) / (g + coeff);
      const double b = std::clamp((alpha + raw) * y, 0.0, 1.0);
      return b * y - alpha;
    }
    case LossKind::logistic:
      if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgument("logistic dual step needs eta in (0, 1]");
      return -eta * (loss_deriv(loss, inner, y) + alpha);
  }
  return 0.0;
}

}  // namespace ascd
