#pragma once

#include <cstdint>
#include <vector>

#include "allocbench/rng.hpp"
#include "allocbench/types.hpp"

namespace allocbench {

// Draws d distinct bin indices uniformly over all d-subsets of [0, n),
// sorted ascending. Consumes exactly d draws from rng.
std::vector<int> choose_candidates(Stream& rng, long n, int d);
void choose_candidates(Stream& rng, long n, int d, std::vector<int>& out);

// Aggregates a finished run into the report contract. `outcomes` supplies
// the retry histogram; totals must match what was actually placed.
GapReport gap_report(const std::vector<BinState>& bins,
                     const std::vector<AllocationOutcome>& outcomes, double total_weight,
                     long messages = 0);

// Report built incrementally by the runners (no stored trace needed).
GapReport gap_report_from_state(const std::vector<BinState>& bins, double total_weight,
                                const std::map<int, long>& retry_histogram, long messages);

// Order-independent multi-trial aggregation. Real-valued sums are
// accumulated on a 1e-9 grid so merging trials in any permutation yields
// bit-identical aggregates.
struct ReportAggregate {
  long trials = 0;
  double max_load = 0.0;
  double min_load = 0.0;
  double gap_max = 0.0;
  int64_t gap_sum_q = 0;
  int64_t mean_retries_sum_q = 0;
  int64_t sum_est_gap_sum_q = 0;
  long messages_total = 0;

  void add(const GapReport& r);
  void merge(const ReportAggregate& other);
  double gap_mean() const;
  double mean_retries_mean() const;
};

// 64-bit FNV-1a over (load, est_avg) pairs in bin order, each value
// quantized to a 1e-9 grid. Cheap divergence detection for trace replay.
uint64_t snapshot_hash(const std::vector<BinState>& bins);

}  // namespace allocbench
