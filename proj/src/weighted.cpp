#include "allocbench/weighted.hpp"

#include <cmath>

namespace allocbench {

namespace {

// Box-Muller, two fresh draws per value (no cached spare, so stream
// consumption per call is fixed at two).
double standard_normal(Stream& rng) {
  double u1 = rng.real01();
  double u2 = rng.real01();
  // real01 can return 0; push it off the log singularity.
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

double sample_weight(const WeightModel& model, Stream& rng) {
  model.validate();
  if (model.k == 0.0) return model.w_star;
  switch (model.shape) {
    case WeightShape::Uniform:
      return (model.w_star - model.k) + rng.real01() * (2.0 * model.k);
    case WeightShape::TwoPoint: {
      const double up = model.k * std::min(1.0, (1.0 - model.p) / model.p);
      const double down = model.k * std::min(1.0, model.p / (1.0 - model.p));
      return rng.real01() < model.p ? model.w_star + up : model.w_star - down;
    }
    case WeightShape::TruncatedNormal: {
      while (true) {
        double w = model.w_star + model.sigma * standard_normal(rng);
        if (w >= model.w_star - model.k && w <= model.w_star + model.k) return w;
      }
    }
  }
  return model.w_star;
}

AllocationOutcome allocate_weighted_ball(SystemState& state, long ball_index,
                                         const RngContract& rng, const SimConfig& cfg,
                                         const WeightModel& model) {
  Stream ws = rng.ball_stream(ball_index, kPurposeWeight);
  const double w = sample_weight(model, ws);
  EstimateUpdatePolicy policy = EstimateUpdatePolicy::from_config(cfg);

  Stream cand = rng.ball_stream(ball_index, kPurposeCandidates);
  Stream tie = rng.ball_stream(ball_index, kPurposeTieBreak);
  AllocationOutcome out;
  out.ball_index = ball_index;
  std::vector<int> scratch;
  auto gap_of = [&state](int b) { return estimated_gap(state.bins[(size_t)b]); };
  detail::Selection sel =
      detail::select_destination(cand, tie, state.n(), cfg.d, cfg.effective_gamma_max(), gap_of,
                                 scratch, cfg.record_trace ? &out.candidates : nullptr);
  out.retries_used = sel.retries_used;
  out.found_nonpositive = sel.found_nonpositive;
  out.destination = sel.destination;

  state.add_load(sel.destination, w);
  int applied = detail::apply_estimate_updates(state, scratch, ball_index, cfg, policy, rng, w,
                                               model.w_star);
  state.balls_placed += 1;
  state.track_ball_delta(w * (1.0 - (double)applied / (double)cfg.d));
  return out;
}

}  // namespace allocbench
