#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ascd/error.hpp"
#include "ascd/sparse_matrix.hpp"

namespace ascd {

struct Dataset {
  SparseMatrix X;
  std::vector<double> y;

  std::size_t n() const noexcept { return X.cols(); }
  std::size_t d() const noexcept { return X.rows(); }

  std::vector<std::size_t> empty_columns() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < X.cols(); ++j)
      if (X.col_nnz(j) == 0) out.push_back(j);
    return out;
  }

  std::vector<std::size_t> empty_rows() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < X.rows(); ++i)
      if (X.row_nnz(i) == 0) out.push_back(i);
    return out;
  }

  /// Throws unless labels match columns and every example has a feature.
  void validate() const {
    if (y.size() != X.cols()) throw InvalidArgument("label count does not match example count");
    if (X.cols() == 0) throw InvalidArgument("dataset has no examples");
    if (!empty_columns().empty()) throw InvalidArgument("dataset has an example without features");
  }

  bool binary_labels() const {
    for (double v : y)
      if (v != 1.0 && v != -1.0) return false;
    return true;
  }
};

/// Divides every entry by the mean column norm (1/n) sum_j ||X_:j||.
inline Dataset normalize_by_avg_col_norm(const Dataset& ds) {
  const auto s = col_stats(ds.X);
  double mean = 0.0;
  for (std::size_t j = 0; j < s.norms_sq.size(); ++j) {
    if (s.nnz[j] == 0) throw InvalidArgument("cannot normalize: all-zero column");
    mean += std::sqrt(s.norms_sq[j]);
  }
  mean /= static_cast<double>(s.norms_sq.size());
  if (!(mean > 0.0)) throw InvalidArgument("cannot normalize: zero average column norm");
  return Dataset{ds.X.scaled(1.0 / mean), ds.y};
}

}  // namespace ascd
