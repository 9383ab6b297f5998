#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "ascd/problem.hpp"
#include "ascd/trace.hpp"

namespace ascd::detail {

inline double relative_drift(std::span<const double> cached, std::span<const double> exact) {
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < cached.size(); ++i) {
    diff += (cached[i] - exact[i]) * (cached[i] - exact[i]);
    norm += exact[i] * exact[i];
  }
  return std::sqrt(diff) / (1.0 + std::sqrt(norm));
}

/// Checkpoint bookkeeping shared by the ERM solvers.
class RunContext {
 public:
  /// `unit_nnz` holds the per-unit workloads for the cost model; defaults to column nnz.
  RunContext(const Problem& p, const Budget& b, std::size_t epoch_len, CostMode mode = CostMode::standard,
             const Partition* groups = nullptr, std::vector<std::size_t> unit_nnz = {})
      : prob_(p),
        budget_(b),
        epoch_len_(epoch_len == 0 ? 1 : epoch_len),
        nnz_total_(static_cast<double>(p.X().nnz())),
        meter_(unit_nnz.empty() ? col_stats(p.X()).nnz : std::move(unit_nnz), mode, groups) {
    if (!(budget_.checkpoint_every > 0.0)) throw InvalidArgument("checkpoint cadence must be positive");
    max_iters_ = static_cast<std::size_t>(std::ceil(budget_.max_epochs * static_cast<double>(epoch_len_)));
    check_len_ = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(budget_.checkpoint_every * static_cast<double>(epoch_len_))));
    trace_.info["epoch_length"] = std::to_string(epoch_len_);
  }

  std::size_t epoch_length() const noexcept { return epoch_len_; }
  std::size_t max_iterations() const noexcept { return max_iters_; }
  bool at_checkpoint(std::size_t iter) const noexcept { return iter % check_len_ == 0 || iter == max_iters_; }

  void visit(double nnz) noexcept { visited_ += nnz; }
  void visit_column(std::size_t j) { visited_ += static_cast<double>(prob_.X().col_nnz(j)); }
  void visit_row(std::size_t i) { visited_ += static_cast<double>(prob_.X().row_nnz(i)); }
  double visited() const noexcept { return visited_; }

  ParallelCostMeter& meter() noexcept { return meter_; }

  void track_drift(double drift) {
    if (drift > max_drift_) max_drift_ = drift;
  }

  /// Appends a row; returns true when the run should stop.
  bool record(std::size_t iter, double primal, double dual, double theta = kNaN, double potential = kNaN,
              double lambda = kNaN) {
    TraceRow r;
    r.epoch = static_cast<double>(iter) / static_cast<double>(epoch_len_);
    r.effective_passes = visited_ / nnz_total_;
    r.wall_seconds = clock_.seconds();
    r.simulated_parallel_cost = meter_.total();
    r.primal = primal;
    r.dual = dual;
    r.gap = std::isnan(dual) ? kNaN : primal - dual;
    r.theta = theta;
    r.potential = potential;
    r.lambda = lambda;
    trace_.rows.push_back(r);
    trace_.iterations = iter;
    if (!std::isfinite(primal) || (!std::isnan(dual) && !std::isfinite(dual))) {
      trace_.status = "nonfinite";
      return true;
    }
    if (budget_.target_gap > 0.0 && !std::isnan(r.gap) && r.gap <= budget_.target_gap) {
      trace_.status = "target";
      return true;
    }
    return false;
  }

  Trace finish() {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << max_drift_;
    trace_.info["max_cache_drift"] = os.str();
    return std::move(trace_);
  }

  Trace& trace() noexcept { return trace_; }
  const Budget& budget() const noexcept { return budget_; }

 private:
  const Problem& prob_;
  Budget budget_;
  std::size_t epoch_len_;
  std::size_t max_iters_ = 0;
  std::size_t check_len_ = 1;
  double nnz_total_;
  double visited_ = 0.0;
  double max_drift_ = 0.0;
  ParallelCostMeter meter_;
  Stopwatch clock_;
  Trace trace_;
};

}  // namespace ascd::detail
