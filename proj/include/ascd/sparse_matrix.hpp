#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "ascd/error.hpp"

namespace ascd {

struct Entry {
  std::size_t index;
  double value;

  friend bool operator==(const Entry&, const Entry&) = default;
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// d x n sparse matrix, examples as columns. Column and row views are both
/// materialized and hold the same nonzeros.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// Duplicate (row, col) pairs are an error; explicit zeros are dropped.
  static SparseMatrix from_triplets(std::size_t d, std::size_t n, std::vector<Triplet> t) {
    for (const auto& e : t) {
      if (e.row >= d || e.col >= n) throw InvalidArgument("triplet index out of range");
    }
    std::erase_if(t, [](const Triplet& e) { return e.value == 0.0; });
    std::sort(t.begin(), t.end(),
              [](const Triplet& a, const Triplet& b) { return std::tie(a.col, a.row) < std::tie(b.col, b.row); });
    SparseMatrix m;
    m.d_ = d;
    m.n_ = n;
    m.col_ptr_.assign(n + 1, 0);
    m.col_entries_.reserve(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (k > 0 && t[k].col == t[k - 1].col && t[k].row == t[k - 1].row)
        throw InvalidArgument("duplicate entry in sparse matrix");
      m.col_entries_.push_back({t[k].row, t[k].value});
      ++m.col_ptr_[t[k].col + 1];
    }
    for (std::size_t j = 0; j < n; ++j) m.col_ptr_[j + 1] += m.col_ptr_[j];
    m.build_rows();
    return m;
  }

  /// Columns must have strictly increasing row indices.
  static SparseMatrix from_columns(std::size_t d, const std::vector<std::vector<Entry>>& cols) {
    SparseMatrix m;
    m.d_ = d;
    m.n_ = cols.size();
    m.col_ptr_.assign(m.n_ + 1, 0);
    for (std::size_t j = 0; j < m.n_; ++j) {
      std::size_t prev = 0;
      bool first = true;
      for (const auto& e : cols[j]) {
        if (e.index >= d) throw InvalidArgument("row index out of range");
        if (!first && e.index <= prev) throw InvalidArgument("row indices must be strictly increasing");
        prev = e.index;
        first = false;
        if (e.value != 0.0) m.col_entries_.push_back(e);
      }
      m.col_ptr_[j + 1] = m.col_entries_.size();
    }
    m.build_rows();
    return m;
  }

  static SparseMatrix from_dense(const Eigen::MatrixXd& a) {
    std::vector<Triplet> t;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index i = 0; i < a.rows(); ++i)
        if (a(i, j) != 0.0) t.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), a(i, j)});
    return from_triplets(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()), std::move(t));
  }

  std::size_t rows() const noexcept { return d_; }
  std::size_t cols() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return col_entries_.size(); }

  std::span<const Entry> col(std::size_t j) const {
    return {col_entries_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
  }
  std::span<const Entry> row(std::size_t i) const {
    return {row_entries_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::size_t col_nnz(std::size_t j) const { return col_ptr_[j + 1] - col_ptr_[j]; }
  std::size_t row_nnz(std::size_t i) const { return row_ptr_[i + 1] - row_ptr_[i]; }

  double col_dot(std::size_t j, std::span<const double> w) const {
    double s = 0.0;
    for (const auto& e : col(j)) s += e.value * w[e.index];
    return s;
  }
  void col_axpy(std::size_t j, double a, std::span<double> w) const {
    for (const auto& e : col(j)) w[e.index] += a * e.value;
  }
  double row_dot(std::size_t i, std::span<const double> z) const {
    double s = 0.0;
    for (const auto& e : row(i)) s += e.value * z[e.index];
    return s;
  }
  void row_axpy(std::size_t i, double a, std::span<double> z) const {
    for (const auto& e : row(i)) z[e.index] += a * e.value;
  }

  /// X^T w, length n.
  std::vector<double> transpose_times(std::span<const double> w) const {
    std::vector<double> out(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = col_dot(j, w);
    return out;
  }
  /// X a, length d.
  std::vector<double> times(std::span<const double> a) const {
    std::vector<double> out(d_, 0.0);
    for (std::size_t j = 0; j < n_; ++j)
      if (a[j] != 0.0) col_axpy(j, a[j], out);
    return out;
  }

  SparseMatrix transpose() const {
    SparseMatrix t;
    t.d_ = n_;
    t.n_ = d_;
    t.col_ptr_ = row_ptr_;
    t.col_entries_ = row_entries_;
    t.row_ptr_ = col_ptr_;
    t.row_entries_ = col_entries_;
    return t;
  }

  SparseMatrix scaled(double s) const {
    SparseMatrix m = *this;
    for (auto& e : m.col_entries_) e.value *= s;
    for (auto& e : m.row_entries_) e.value *= s;
    return m;
  }

  Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d_), static_cast<Eigen::Index>(n_));
    for (std::size_t j = 0; j < n_; ++j)
      for (const auto& e : col(j)) a(static_cast<Eigen::Index>(e.index), static_cast<Eigen::Index>(j)) = e.value;
    return a;
  }

  /// True iff both views hold the same nonzeros with sorted, zero-free lists.
  bool views_consistent() const {
    if (col_entries_.size() != row_entries_.size()) return false;
    std::vector<std::tuple<std::size_t, std::size_t, double>> a, b;
    for (std::size_t j = 0; j < n_; ++j) {
      auto c = col(j);
      for (std::size_t k = 0; k < c.size(); ++k) {
        if (c[k].value == 0.0 || (k > 0 && c[k].index <= c[k - 1].index)) return false;
        a.emplace_back(c[k].index, j, c[k].value);
      }
    }
    for (std::size_t i = 0; i < d_; ++i) {
      auto r = row(i);
      for (std::size_t k = 0; k < r.size(); ++k) {
        if (r[k].value == 0.0 || (k > 0 && r[k].index <= r[k - 1].index)) return false;
        b.emplace_back(i, r[k].index, r[k].value);
      }
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
  }

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
    return a.d_ == b.d_ && a.n_ == b.n_ && a.col_ptr_ == b.col_ptr_ && a.col_entries_ == b.col_entries_;
  }

 private:
  void build_rows() {
    row_ptr_.assign(d_ + 1, 0);
    for (const auto& e : col_entries_) ++row_ptr_[e.index + 1];
    for (std::size_t i = 0; i < d_; ++i) row_ptr_[i + 1] += row_ptr_[i];
    row_entries_.resize(col_entries_.size());
    std::vector<std::size_t> fill(row_ptr_.begin(), row_ptr_.end() - 1);
    for (std::size_t j = 0; j < n_; ++j)
      for (const auto& e : col(j)) row_entries_[fill[e.index]++] = {j, e.value};
  }

  std::size_t d_ = 0;
  std::size_t n_ = 0;
  std::vector<std::size_t> col_ptr_{0};
  std::vector<Entry> col_entries_;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Entry> row_entries_;
};

struct VectorStats {
  std::vector<double> norms_sq;
  std::vector<std::size_t> nnz;
};

inline VectorStats col_stats(const SparseMatrix& x) {
  VectorStats s{std::vector<double>(x.cols(), 0.0), std::vector<std::size_t>(x.cols(), 0)};
  for (std::size_t j = 0; j < x.cols(); ++j) {
    for (const auto& e : x.col(j)) s.norms_sq[j] += e.value * e.value;
    s.nnz[j] = x.col_nnz(j);
  }
  return s;
}

inline VectorStats row_stats(const SparseMatrix& x) {
  VectorStats s{std::vector<double>(x.rows(), 0.0), std::vector<std::size_t>(x.rows(), 0)};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (const auto& e : x.row(i)) s.norms_sq[i] += e.value * e.value;
    s.nnz[i] = x.row_nnz(i);
  }
  return s;
}

}  // namespace ascd
