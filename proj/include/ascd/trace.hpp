#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ascd/sampling.hpp"

namespace ascd {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TraceRow {
  double epoch = 0.0;
  double effective_passes = 0.0;
  double wall_seconds = 0.0;
  double simulated_parallel_cost = 0.0;
  double primal = kNaN;
  double dual = kNaN;
  double gap = kNaN;
  double lambda = kNaN;     // forcing function value
  double theta = kNaN;      // stepsize or proportion
  double potential = kNaN;  // Lyapunov potential when a reference optimum is known
};

struct Trace {
  std::vector<TraceRow> rows;
  std::string status = "budget";  // budget | target | optimal | stationary | nonfinite
  std::size_t iterations = 0;
  double operations = 0.0;  // nonzeros visited plus sampling-structure node visits
  std::vector<std::vector<std::size_t>> sampled_sets;  // filled when recording is requested
  std::map<std::string, std::string> info;

  const TraceRow& last() const { return rows.back(); }

  /// First row with gap <= target, if any.
  std::optional<TraceRow> first_reaching(double target) const {
    for (const auto& r : rows)
      if (r.gap <= target) return r;
    return std::nullopt;
  }
};

/// Stopping rule: epoch budget and optional duality-gap target.
struct Budget {
  double max_epochs = 100.0;
  double target_gap = 0.0;  // stop once gap <= target; 0 disables
  bool record_sets = false;
  double checkpoint_every = 1.0;  // epochs between logged rows
};

enum class CostMode { standard, chunked };

/// Cumulative simulated parallel time: each iteration costs the largest nnz
/// load among its parallel units (single examples, or whole groups).
class ParallelCostMeter {
 public:
  ParallelCostMeter(std::vector<std::size_t> nnz, CostMode mode, const Partition* groups = nullptr)
      : nnz_(std::move(nnz)), mode_(mode) {
    if (mode_ == CostMode::chunked && groups) {
      group_nnz_.assign(groups->size(), 0);
      for (std::size_t l = 0; l < groups->size(); ++l)
        for (auto j : groups->groups[l]) group_nnz_[l] += nnz_[j];
    }
  }

  double add(std::span<const std::size_t> S, std::span<const std::size_t> chosen_groups = {}) {
    std::size_t c = 0;
    if (mode_ == CostMode::chunked && !group_nnz_.empty()) {
      for (auto g : chosen_groups) c = std::max(c, group_nnz_[g]);
    } else {
      for (auto j : S) c = std::max(c, nnz_[j]);
    }
    total_ += static_cast<double>(c);
    return static_cast<double>(c);
  }

  double total() const noexcept { return total_; }

 private:
  std::vector<std::size_t> nnz_;
  std::vector<std::size_t> group_nnz_;
  CostMode mode_;
  double total_ = 0.0;
};

/// Cumulative cost series for recorded sets (standard mode) or group choices (chunked mode).
inline std::vector<double> simulated_parallel_cost(const std::vector<std::vector<std::size_t>>& sets,
                                                   std::span<const std::size_t> nnz, CostMode mode,
                                                   const Partition* groups = nullptr) {
  ParallelCostMeter meter(std::vector<std::size_t>(nnz.begin(), nnz.end()), mode, groups);
  std::vector<double> out;
  out.reserve(sets.size());
  for (const auto& s : sets) {
    if (mode == CostMode::chunked) {
      meter.add({}, s);
    } else {
      meter.add(s);
    }
    out.push_back(meter.total());
  }
  return out;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline bool all_finite(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return !std::isnan(x) && !std::isinf(x); });
}

}  // namespace ascd
