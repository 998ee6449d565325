#pragma once

#include <vector>

#include "allocbench/core.hpp"
#include "allocbench/rng.hpp"
#include "allocbench/types.hpp"

namespace allocbench {

struct EstimateUpdatePolicy {
  Mode mode = Mode::Numbered;
  int sample_size_small = 1;   // ceil(log2 n); used while balls_placed < n*ceil(log2 n)
  int sample_size_large = 8;   // constant phase
  double epsilon = 0.05;

  static EstimateUpdatePolicy from_config(const SimConfig& cfg);
};

// Mutable run state shared by the sequential allocators. The estimated-gap
// sum is tracked per ball (Kahan-compensated) so the zero-sum bookkeeping
// can be asserted without storing a trace.
struct SystemState {
  std::vector<BinState> bins;
  long balls_placed = 0;
  long messages_sent = 0;

  long nonpositive_count = 0;  // bins with estimated gap <= 0
  double sum_est_gap = 0.0;    // running sum of per-ball deltas
  double sum_est_gap_comp = 0.0;

  explicit SystemState(long n) : bins((size_t)n), nonpositive_count(n) {}
  long n() const { return (long)bins.size(); }

  void add_load(int bin, double w);
  void add_est(int bin, double inc);
  void track_ball_delta(double delta);
};

// Per-run statistics the lemma-level checks need beyond the GapReport.
struct RunDiagnostics {
  double checkpoint_sum_gap_maxabs = 0.0;  // max |sum est gap| at multiples of n
  double checkpoint_sum_gap_final = 0.0;
  double checkpoint_nonpos_min = 1.0;  // min nonpositive fraction at multiples of n
  double ungated_delta_maxabs = 0.0;   // max |per-ball delta| over ungated balls
  long gated_balls = 0;                // balls with at least one skipped increment
  long band_balls = 0;                 // balls arriving with nonpos fraction in [0.45,0.55]
  long band_success2 = 0;              // of those, retry loop broke within 2 draws
  double est_avg_mean = 0.0;
  double est_avg_max = 0.0;
  double md_gap = -1.0;        // multidim only
  bool no_claim = false;       // multidim custom distribution: no gap guarantee
  long rounds = 0;             // parallel only
  long round_violations = 0;   // parallel only
  long msg_query = 0, msg_reply = 0, msg_c1 = 0, msg_c2 = 0, msg_inc = 0,
       msg_sampling = 0;       // parallel per-kind totals
  double total_weight = 0.0;
};

struct RunResult {
  GapReport report;
  RunDiagnostics diag;
  std::vector<BinState> bins;
  std::vector<long> candidacy_counts;    // final-set candidacies per bin (idea runs)
  std::vector<AllocationOutcome> trace;  // populated only when cfg.record_trace
  std::vector<uint64_t> trace_hashes;    // post-placement snapshot hash per trace entry
};

// One ball of the estimated-average allocator (unweighted). Runs the retry
// loop, places into the minimum-estimated-gap bin of the final set (ties
// uniform), and applies the active estimate-update policy to all d
// candidates of the final set.
AllocationOutcome allocate_ball(SystemState& state, long ball_index, const RngContract& rng,
                                const SimConfig& cfg);

// Numbered-mode estimate update: each candidate's est_avg grows by weight/d
// unless it already exceeds ceil(ball_index/n) * unit. Returns the number of
// increments applied.
int numbered_increment(SystemState& state, const std::vector<int>& candidates, long ball_index,
                       int d, double weight = 1.0, double unit = 1.0);

// Sampled-mode gate for an increment about to push bin `bin_index`'s
// estimate past level alpha*unit: polls N peers (N per policy and phase,
// self excluded) and allows the increment iff the sampled mean of their
// estimates is >= (alpha - epsilon) * unit. Adds N to messages_sent.
bool sampled_increment_decision(SystemState& state, int bin_index, Stream& rng,
                                const EstimateUpdatePolicy& policy, long alpha, double unit = 1.0);

// Runs all m balls of a sequential configuration (any algorithm, any
// non-parallel variant) and aggregates the report.
RunResult run_sequential(const SimConfig& cfg);
RunResult run_sequential_with_seed(const SimConfig& cfg, uint64_t trial_seed);

namespace detail {

// Shared retry/placement step: draws candidate sets until one contains a
// nonpositive-gap bin (or gamma_max retries are spent), then returns the
// minimum-gap bin of the final set. `gap_of` abstracts live vs snapshot
// gaps so the parallel round can reuse the exact same selection semantics.
struct Selection {
  int destination;
  int retries_used;
  bool found_nonpositive;
};

template <typename GapFn>
Selection select_destination(Stream& cand, Stream& tie, long n, int d, int gamma_max,
                             GapFn&& gap_of, std::vector<int>& scratch,
                             std::vector<std::vector<int>>* record) {
  int draws = 0;
  bool found = false;
  while (true) {
    choose_candidates(cand, n, d, scratch);
    ++draws;
    if (record) record->push_back(scratch);
    found = false;
    for (int b : scratch) {
      if (gap_of(b) <= 0.0) {
        found = true;
        break;
      }
    }
    if (found || draws > gamma_max) break;
  }
  double best = gap_of(scratch[0]);
  int ties = 1;
  for (size_t q = 1; q < scratch.size(); ++q) {
    double g = gap_of(scratch[q]);
    if (g < best) {
      best = g;
      ties = 1;
    } else if (g == best) {
      ++ties;
    }
  }
  int pick = ties > 1 ? (int)tie.bounded((uint64_t)ties) : 0;
  int dest = scratch[0];
  for (int b : scratch) {
    if (gap_of(b) == best && pick-- == 0) {
      dest = b;
      break;
    }
  }
  return {dest, draws, found};
}

// Applies the active estimate-update policy to the final candidate set.
// Returns the number of increments actually applied.
int apply_estimate_updates(SystemState& state, const std::vector<int>& candidates,
                           long ball_index, const SimConfig& cfg,
                           const EstimateUpdatePolicy& policy, const RngContract& rng,
                           double weight, double unit);

}  // namespace detail

}  // namespace allocbench
