#include "allocbench/multidim.hpp"

#include <algorithm>

namespace allocbench {

MdBall generate_md_ball(int dims, int populated, Stream& rng) {
  if (populated < 1 || populated > dims)
    throw ConfigError("generate_md_ball: need 1 <= populated <= dims");
  MdBall ball;
  ball.dims = dims;
  choose_candidates(rng, dims, populated, ball.populated);
  return ball;
}

void MdDistribution::validate(int dims) const {
  if (uniform) return;
  if (subsets.empty() || subsets.size() != weights.size())
    throw ConfigError("md distribution: need matching nonempty subsets and weights");
  for (size_t i = 0; i < subsets.size(); ++i) {
    if (!(weights[i] > 0)) throw ConfigError("md distribution: weights must be positive");
    const auto& s = subsets[i];
    if (s.empty() || (int)s.size() > dims)
      throw ConfigError("md distribution: subset size must be in [1, dims]");
    for (size_t q = 0; q < s.size(); ++q) {
      if (s[q] < 0 || s[q] >= dims) throw ConfigError("md distribution: dimension out of range");
      if (q > 0 && s[q] <= s[q - 1])
        throw ConfigError("md distribution: subsets must be sorted and distinct");
    }
  }
}

double MdDistribution::mean_populated(int fallback_f) const {
  if (uniform) return (double)fallback_f;
  double total = 0, acc = 0;
  for (size_t i = 0; i < subsets.size(); ++i) {
    total += weights[i];
    acc += weights[i] * (double)subsets[i].size();
  }
  return acc / total;
}

std::vector<double> MdDistribution::marginals(int dims) const {
  std::vector<double> out((size_t)dims, 0.0);
  if (uniform) return out;  // uniform case handled analytically by the caller
  double total = 0;
  for (double w : weights) total += w;
  for (size_t i = 0; i < subsets.size(); ++i) {
    for (int q : subsets[i]) out[(size_t)q] += weights[i] / total;
  }
  return out;
}

MdBall generate_md_ball(const Variant& variant, Stream& rng) {
  if (variant.md_dist.uniform)
    return generate_md_ball(variant.dims, variant.populated, rng);
  const MdDistribution& dist = variant.md_dist;
  double total = 0;
  for (double w : dist.weights) total += w;
  double u = rng.real01() * total;
  double acc = 0;
  size_t pick = dist.subsets.size() - 1;
  for (size_t i = 0; i < dist.subsets.size(); ++i) {
    acc += dist.weights[i];
    if (u < acc) {
      pick = i;
      break;
    }
  }
  MdBall ball;
  ball.dims = variant.dims;
  ball.populated = dist.subsets[pick];
  return ball;
}

double MdLoads::max_dimension_gap(long balls_thrown, int populated) const {
  const double avg = (double)balls_thrown * (double)populated / ((double)n * (double)dims);
  int worst = 0;
  for (int a = 0; a < dims; ++a) {
    for (long b = 0; b < n; ++b) worst = std::max(worst, at((int)b, a));
  }
  // Uniform variant: every dimension has the same analytic average, so the
  // max over dimensions is the global max dim load minus avg.
  return (double)worst - avg;
}

double MdLoads::max_dimension_gap(long balls_thrown, const std::vector<double>& marginals) const {
  double worst = -1e300;
  for (int a = 0; a < dims; ++a) {
    int mx = 0;
    for (long b = 0; b < n; ++b) mx = std::max(mx, at((int)b, a));
    double avg = (double)balls_thrown * marginals[(size_t)a] / (double)n;
    worst = std::max(worst, (double)mx - avg);
  }
  return worst;
}

std::vector<MdBinState> MdLoads::to_bin_states(const std::vector<BinState>& scalar) const {
  std::vector<MdBinState> out((size_t)n);
  for (long b = 0; b < n; ++b) {
    out[(size_t)b].dim_loads.assign(loads.begin() + b * dims, loads.begin() + (b + 1) * dims);
    out[(size_t)b].est_avg = scalar[(size_t)b].est_avg;
  }
  return out;
}

double md_gap(const std::vector<MdBinState>& bins, long balls_thrown, int dims, int populated) {
  if (bins.empty()) return 0.0;
  const double avg =
      (double)balls_thrown * (double)populated / ((double)bins.size() * (double)dims);
  double worst = 0.0;
  for (int a = 0; a < dims; ++a) {
    int mx = 0;
    for (const MdBinState& b : bins) mx = std::max(mx, b.dim_loads[(size_t)a]);
    worst = std::max(worst, (double)mx - avg);
  }
  return worst;
}

AllocationOutcome allocate_md_ball(SystemState& state, MdLoads& loads, long ball_index,
                                   const MdBall& ball, const RngContract& rng,
                                   const SimConfig& cfg) {
  EstimateUpdatePolicy policy = EstimateUpdatePolicy::from_config(cfg);
  const double f = (double)ball.populated.size();

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

  state.add_load(sel.destination, f);
  loads.place(sel.destination, ball);
  int applied =
      detail::apply_estimate_updates(state, scratch, ball_index, cfg, policy, rng, f, f);
  state.balls_placed += 1;
  state.track_ball_delta(f * (1.0 - (double)applied / (double)cfg.d));
  return out;
}

}  // namespace allocbench
