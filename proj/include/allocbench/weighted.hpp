#pragma once

#include "allocbench/idea.hpp"
#include "allocbench/rng.hpp"
#include "allocbench/types.hpp"

namespace allocbench {

// Draws one ball weight. Every draw lands in [w_star - k, w_star + k] and
// the distribution mean is w_star:
//   uniform   — U[w_star-k, w_star+k]
//   twopoint  — the upper point sits at w_star + k*min(1,(1-p)/p), the lower
//               at w_star - k*min(1,p/(1-p)); at p=1/2 this is {w_star±k}
//   tnormal   — N(w_star, sigma^2) redrawn until inside the bound (symmetric
//               truncation keeps the mean at w_star)
double sample_weight(const WeightModel& model, Stream& rng);

// One weighted ball: identical retry/placement to allocate_ball, with the
// destination load growing by W, candidate estimates by W/d, and the
// Numbered cap scaled to ceil(j/n) * w_star.
AllocationOutcome allocate_weighted_ball(SystemState& state, long ball_index,
                                         const RngContract& rng, const SimConfig& cfg,
                                         const WeightModel& model);

}  // namespace allocbench
