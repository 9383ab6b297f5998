#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ascd/dataset.hpp"
#include "ascd/error.hpp"
#include "ascd/rng.hpp"

namespace ascd {

enum class NormLawKind { constant, uniform, chisq, extreme };

/// Distribution of the squared column norms ||X_:j||^2.
struct NormLaw {
  NormLawKind kind = NormLawKind::constant;
  double param = 1.0;  // constant: value; chisq: degrees of freedom; extreme: big norm; uniform: unused

  static NormLaw constant(double v) { return {NormLawKind::constant, v}; }
  static NormLaw uniform() { return {NormLawKind::uniform, 2.0}; }
  static NormLaw chisq(double k) { return {NormLawKind::chisq, k}; }
  static NormLaw extreme(double big) { return {NormLawKind::extreme, big}; }
};

struct SyntheticSpec {
  std::size_t n = 0;
  std::size_t d = 0;
  double sparsity = 1.0;
  NormLaw norm_law;
  std::uint64_t seed = 0;
};

/// Squared column norms drawn from the law.
inline std::vector<double> draw_norms_sq(const NormLaw& law, std::size_t n, Rng& rng) {
  std::vector<double> L(n, 1.0);
  switch (law.kind) {
    case NormLawKind::constant:
      if (!(law.param > 0.0)) throw InvalidArgument("constant norm must be positive");
      std::fill(L.begin(), L.end(), law.param);
      break;
    case NormLawKind::uniform:
      for (auto& v : L) {
        do {
          v = 2.0 * rng.uniform();
        } while (v == 0.0);
      }
      break;
    case NormLawKind::chisq: {
      const auto k = static_cast<std::size_t>(law.param);
      if (k == 0 || static_cast<double>(k) != law.param) throw InvalidArgument("chisq needs a positive integer k");
      for (auto& v : L) {
        do {
          v = 0.0;
          for (std::size_t t = 0; t < k; ++t) {
            const double z = rng.normal();
            v += z * z;
          }
        } while (v == 0.0);
      }
      break;
    }
    case NormLawKind::extreme:
      if (!(law.param > 0.0)) throw InvalidArgument("extreme big norm must be positive");
      if (n > 0) L[0] = law.param;
      break;
  }
  return L;
}

/// Per-row sparsity coefficients are uniform on an interval centred at the
/// target density; columns are rescaled to the drawn norms and labelled by
/// the sign of a planted Gaussian model.
inline Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (!(spec.sparsity > 0.0 && spec.sparsity <= 1.0)) throw InvalidArgument("sparsity must lie in (0, 1]");
  if (spec.n == 0 || spec.d == 0) throw InvalidArgument("synthetic data needs n, d >= 1");
  const Rng root(spec.seed);
  Rng r_rows = root.split("row-sparsity");
  Rng r_pattern = root.split("pattern");
  Rng r_norms = root.split("norms");
  Rng r_labels = root.split("labels");

  const double lo = std::max(0.0, 2.0 * spec.sparsity - 1.0);
  const double hi = std::min(1.0, 2.0 * spec.sparsity);
  std::vector<double> omega(spec.d);
  for (auto& o : omega) o = lo + (hi - lo) * r_rows.uniform();

  std::vector<std::vector<Entry>> cols(spec.n);
  for (std::size_t j = 0; j < spec.n; ++j) {
    auto& col = cols[j];
    for (std::size_t i = 0; i < spec.d; ++i) {
      const double u = r_pattern.uniform();
      const double z = r_pattern.normal();
      if (u < omega[i] && z != 0.0) col.push_back({i, z});
    }
    if (col.empty()) {
      const std::size_t i = r_pattern.index(spec.d);
      double z;
      do {
        z = r_pattern.normal();
      } while (z == 0.0);
      col.push_back({i, z});
    }
  }

  const auto L = draw_norms_sq(spec.norm_law, spec.n, r_norms);
  for (std::size_t j = 0; j < spec.n; ++j) {
    double s = 0.0;
    for (const auto& e : cols[j]) s += e.value * e.value;
    const double scale = std::sqrt(L[j] / s);
    for (auto& e : cols[j]) e.value *= scale;
  }

  std::vector<double> w(spec.d);
  for (auto& v : w) v = r_labels.normal();
  std::vector<double> y(spec.n);
  for (std::size_t j = 0; j < spec.n; ++j) {
    double s = 0.0;
    for (const auto& e : cols[j]) s += e.value * w[e.index];
    y[j] = s >= 0.0 ? 1.0 : -1.0;
  }
  return Dataset{SparseMatrix::from_columns(spec.d, cols), std::move(y)};
}

inline std::string to_string(NormLawKind k) {
  switch (k) {
    case NormLawKind::constant: return "constant";
    case NormLawKind::uniform: return "uniform";
    case NormLawKind::chisq: return "chisq";
    case NormLawKind::extreme: return "extreme";
  }
  return "?";
}

}  // namespace ascd
