#include "allocbench/baselines.hpp"

#include <algorithm>

namespace allocbench {

namespace {

// Minimum-load bin of a sorted candidate set, exact ties broken uniformly.
int min_load_bin(const SystemState& state, const std::vector<int>& candidates, Stream& tie) {
  double best = state.bins[(size_t)candidates[0]].load;
  int ties = 1;
  for (size_t q = 1; q < candidates.size(); ++q) {
    double l = state.bins[(size_t)candidates[q]].load;
    if (l < best) {
      best = l;
      ties = 1;
    } else if (l == best) {
      ++ties;
    }
  }
  int pick = ties > 1 ? (int)tie.bounded((uint64_t)ties) : 0;
  for (int b : candidates) {
    if (state.bins[(size_t)b].load == best && pick-- == 0) return b;
  }
  return candidates[0];
}

AllocationOutcome finish(SystemState& state, long ball_index, int dest, int retries) {
  state.add_load(dest, 1.0);
  state.balls_placed += 1;
  state.track_ball_delta(1.0);  // no estimate bookkeeping in baselines
  AllocationOutcome out;
  out.ball_index = ball_index;
  out.retries_used = retries;
  out.destination = dest;
  out.found_nonpositive = false;
  return out;
}

}  // namespace

AllocationOutcome one_choice_allocate(SystemState& state, long ball_index,
                                      const RngContract& rng, const SimConfig& cfg) {
  Stream cand = rng.ball_stream(ball_index, kPurposeCandidates);
  std::vector<int> C = choose_candidates(cand, state.n(), 1);
  AllocationOutcome out = finish(state, ball_index, C[0], 1);
  if (cfg.record_trace) out.candidates.push_back(std::move(C));
  return out;
}

AllocationOutcome greedy_d_allocate(SystemState& state, long ball_index, const RngContract& rng,
                                    const SimConfig& cfg) {
  Stream cand = rng.ball_stream(ball_index, kPurposeCandidates);
  Stream tie = rng.ball_stream(ball_index, kPurposeTieBreak);
  std::vector<int> C = choose_candidates(cand, state.n(), cfg.d);
  int dest = min_load_bin(state, C, tie);
  AllocationOutcome out = finish(state, ball_index, dest, 1);
  if (cfg.record_trace) out.candidates.push_back(std::move(C));
  return out;
}

AllocationOutcome one_plus_beta_allocate(SystemState& state, long ball_index,
                                         const RngContract& rng, const SimConfig& cfg) {
  Stream coin = rng.ball_stream(ball_index, kPurposeCoin);
  if (coin.real01() < cfg.beta) return greedy_d_allocate(state, ball_index, rng, cfg);
  return one_choice_allocate(state, ball_index, rng, cfg);
}

AllocationOutcome greedy_d_retry_allocate(SystemState& state, long ball_index,
                                          const RngContract& rng, const SimConfig& cfg) {
  Stream cand = rng.ball_stream(ball_index, kPurposeCandidates);
  Stream tie = rng.ball_stream(ball_index, kPurposeTieBreak);
  std::vector<std::vector<int>> sets;
  std::vector<int> pool;  // distinct bins seen, for the global minimum
  for (int r = 0; r < cfg.retry_cap; ++r) {
    sets.push_back(choose_candidates(cand, state.n(), cfg.d));
    for (int b : sets.back()) {
      if (std::find(pool.begin(), pool.end(), b) == pool.end()) pool.push_back(b);
    }
  }
  std::sort(pool.begin(), pool.end());
  int dest = min_load_bin(state, pool, tie);
  AllocationOutcome out = finish(state, ball_index, dest, cfg.retry_cap);
  if (cfg.record_trace) out.candidates = std::move(sets);
  return out;
}

}  // namespace allocbench
