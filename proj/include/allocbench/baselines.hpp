#pragma once

#include "allocbench/idea.hpp"
#include "allocbench/rng.hpp"
#include "allocbench/types.hpp"

namespace allocbench {

// Classic allocators run against the same state/report machinery so their
// reports are directly comparable with the estimated-average allocator.
// None of them touch est_avg. They draw from the same per-ball purpose
// streams, so a paired-seed run sees identical candidate sequences.
// Parameterization lives in SimConfig: algorithm, beta (OnePlusBeta),
// retry_cap (GreedyDRetry).

// One uniform bin.
AllocationOutcome one_choice_allocate(SystemState& state, long ball_index,
                                      const RngContract& rng, const SimConfig& cfg);

// d distinct candidates, least load wins (ties uniform).
AllocationOutcome greedy_d_allocate(SystemState& state, long ball_index, const RngContract& rng,
                                    const SimConfig& cfg);

// With probability beta the greedy-d choice, otherwise a single uniform bin.
AllocationOutcome one_plus_beta_allocate(SystemState& state, long ball_index,
                                         const RngContract& rng, const SimConfig& cfg);

// Draws retry_cap candidate sets and places at the minimum-load bin seen
// across all of them. retry_cap=1 is exactly greedy_d.
AllocationOutcome greedy_d_retry_allocate(SystemState& state, long ball_index,
                                          const RngContract& rng, const SimConfig& cfg);

}  // namespace allocbench
