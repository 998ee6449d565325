#include "allocbench/idea.hpp"

#include <algorithm>
#include <cmath>

#include "allocbench/baselines.hpp"
#include "allocbench/multidim.hpp"
#include "allocbench/weighted.hpp"

namespace allocbench {

EstimateUpdatePolicy EstimateUpdatePolicy::from_config(const SimConfig& cfg) {
  EstimateUpdatePolicy p;
  p.mode = cfg.mode;
  p.sample_size_small = cfg.sample_size_small();
  p.sample_size_large = cfg.sample_size_large;
  p.epsilon = cfg.epsilon;
  return p;
}

void SystemState::add_load(int bin, double w) {
  BinState& b = bins[(size_t)bin];
  bool was = estimated_gap(b) <= 0.0;
  b.load += w;
  bool now = estimated_gap(b) <= 0.0;
  nonpositive_count += (now ? 1 : 0) - (was ? 1 : 0);
}

void SystemState::add_est(int bin, double inc) {
  BinState& b = bins[(size_t)bin];
  bool was = estimated_gap(b) <= 0.0;
  b.est_avg += inc;
  bool now = estimated_gap(b) <= 0.0;
  nonpositive_count += (now ? 1 : 0) - (was ? 1 : 0);
}

void SystemState::track_ball_delta(double delta) {
  double y = delta - sum_est_gap_comp;
  double t = sum_est_gap + y;
  sum_est_gap_comp = (t - sum_est_gap) - y;
  sum_est_gap = t;
}

int numbered_increment(SystemState& state, const std::vector<int>& candidates, long ball_index,
                       int d, double weight, double unit) {
  const double cap = (double)ceil_div(ball_index, state.n()) * unit;
  const double inc = weight / d;
  int applied = 0;
  for (int b : candidates) {
    if (state.bins[(size_t)b].est_avg <= cap) {
      state.add_est(b, inc);
      ++applied;
    }
  }
  return applied;
}

bool sampled_increment_decision(SystemState& state, int bin_index, Stream& rng,
                                const EstimateUpdatePolicy& policy, long alpha, double unit) {
  const long n = state.n();
  const long phase_threshold = n * (long)policy.sample_size_small;
  int want = state.balls_placed < phase_threshold ? policy.sample_size_small
                                                  : policy.sample_size_large;
  int N = (int)std::min<long>(want, n - 1);
  if (N < 1) return true;  // no peers to poll
  // Uniform N-subset of the other bins: sample from [0, n-1) and shift
  // indices at or above bin_index up by one.
  std::vector<int> peers;
  choose_candidates(rng, n - 1, N, peers);
  double sum = 0.0;
  for (int q : peers) sum += state.bins[(size_t)(q >= bin_index ? q + 1 : q)].est_avg;
  state.messages_sent += N;
  return sum / N >= ((double)alpha - policy.epsilon) * unit;
}

namespace detail {

int apply_estimate_updates(SystemState& state, const std::vector<int>& candidates,
                           long ball_index, const SimConfig& cfg,
                           const EstimateUpdatePolicy& policy, const RngContract& rng,
                           double weight, double unit) {
  if (policy.mode == Mode::Numbered)
    return numbered_increment(state, candidates, ball_index, cfg.d, weight, unit);

  const double inc = weight / cfg.d;
  Stream samp = rng.ball_stream(ball_index, kPurposeSampling);
  int applied = 0;
  for (int b : candidates) {
    const double pre = state.bins[(size_t)b].est_avg;
    const double post = pre + inc;
    // Crossing test: does this increment push the estimate past an integer
    // level alpha*unit? (alpha >= 1; reaching the level exactly is free.)
    const long alpha = (long)std::ceil(pre / unit);
    bool allow = true;
    if (alpha >= 1 && pre <= (double)alpha * unit && (double)alpha * unit < post)
      allow = sampled_increment_decision(state, b, samp, policy, alpha, unit);
    if (allow) {
      state.add_est(b, inc);
      ++applied;
    }
  }
  return applied;
}

}  // namespace detail

namespace {

// One ball of the estimated-average allocator, generic over the variant's
// weight (scalar load added) and level unit (1, W*, or f).
AllocationOutcome idea_step(SystemState& state, long ball_index, const RngContract& rng,
                            const SimConfig& cfg, const EstimateUpdatePolicy& policy,
                            double weight, double unit, RunDiagnostics* diag,
                            std::vector<int>& scratch, bool record) {
  Stream cand = rng.ball_stream(ball_index, kPurposeCandidates);
  Stream tie = rng.ball_stream(ball_index, kPurposeTieBreak);

  AllocationOutcome out;
  out.ball_index = ball_index;

  const double frac = (double)state.nonpositive_count / (double)state.n();
  const bool in_band = frac >= 0.45 && frac <= 0.55;

  auto gap_of = [&state](int b) { return estimated_gap(state.bins[(size_t)b]); };
  detail::Selection sel =
      detail::select_destination(cand, tie, state.n(), cfg.d, cfg.effective_gamma_max(), gap_of,
                                 scratch, record ? &out.candidates : nullptr);
  out.retries_used = sel.retries_used;
  out.found_nonpositive = sel.found_nonpositive;
  out.destination = sel.destination;

  state.add_load(sel.destination, weight);
  int applied = detail::apply_estimate_updates(state, scratch, ball_index, cfg, policy, rng,
                                               weight, unit);
  state.balls_placed += 1;

  // Net change of sum(L - A): weight went in, applied increments came out.
  const double delta = weight * (1.0 - (double)applied / (double)cfg.d);
  state.track_ball_delta(delta);
  if (diag) {
    if (applied < cfg.d)
      ++diag->gated_balls;
    else
      diag->ungated_delta_maxabs = std::max(diag->ungated_delta_maxabs, std::fabs(delta));
    if (in_band) {
      ++diag->band_balls;
      if (sel.found_nonpositive && sel.retries_used <= 2) ++diag->band_success2;
    }
  }
  return out;
}

}  // namespace

AllocationOutcome allocate_ball(SystemState& state, long ball_index, const RngContract& rng,
                                const SimConfig& cfg) {
  EstimateUpdatePolicy policy = EstimateUpdatePolicy::from_config(cfg);
  std::vector<int> scratch;
  return idea_step(state, ball_index, rng, cfg, policy, 1.0, 1.0, nullptr, scratch,
                   cfg.record_trace);
}

RunResult run_sequential_with_seed(const SimConfig& cfg, uint64_t seed) {
  cfg.validate();
  if (cfg.variant.kind == VariantKind::Parallel)
    throw ConfigError("run_sequential: parallel variant has its own runner");

  RngContract rng{seed};
  EstimateUpdatePolicy policy = EstimateUpdatePolicy::from_config(cfg);
  SystemState state(cfg.n);
  RunResult res;
  std::map<int, long> hist;
  std::vector<int> scratch;
  MdLoads md;
  if (cfg.variant.kind == VariantKind::MultiDim) md.reset(cfg.n, cfg.variant.dims);
  const bool count_candidacies = cfg.algorithm == Algorithm::Idea;
  if (count_candidacies) res.candidacy_counts.assign((size_t)cfg.n, 0);

  double total_weight = 0.0;
  double weight_comp = 0.0;
  auto add_weight = [&](double w) {
    double y = w - weight_comp;
    double t = total_weight + y;
    weight_comp = (t - total_weight) - y;
    total_weight = t;
  };

  for (long j = 1; j <= cfg.m; ++j) {
    AllocationOutcome out;
    switch (cfg.algorithm) {
      case Algorithm::Idea: {
        switch (cfg.variant.kind) {
          case VariantKind::Unweighted:
            out = idea_step(state, j, rng, cfg, policy, 1.0, 1.0, &res.diag, scratch,
                            cfg.record_trace);
            add_weight(1.0);
            break;
          case VariantKind::Weighted: {
            Stream ws = rng.ball_stream(j, kPurposeWeight);
            double w = sample_weight(cfg.variant.weight, ws);
            out = idea_step(state, j, rng, cfg, policy, w, cfg.variant.weight.w_star, &res.diag,
                            scratch, cfg.record_trace);
            add_weight(w);
            break;
          }
          case VariantKind::MultiDim: {
            Stream ds = rng.ball_stream(j, kPurposeDims);
            MdBall ball = generate_md_ball(cfg.variant, ds);
            double f = (double)ball.populated.size();
            double unit = cfg.variant.md_dist.mean_populated(cfg.variant.populated);
            out = idea_step(state, j, rng, cfg, policy, f, unit, &res.diag, scratch,
                            cfg.record_trace);
            md.place(out.destination, ball);
            add_weight(f);
            break;
          }
          case VariantKind::Parallel:
            break;  // unreachable, rejected above
        }
        break;
      }
      case Algorithm::OneChoice:
        out = one_choice_allocate(state, j, rng, cfg);
        add_weight(1.0);
        break;
      case Algorithm::GreedyD:
        out = greedy_d_allocate(state, j, rng, cfg);
        add_weight(1.0);
        break;
      case Algorithm::OnePlusBeta:
        out = one_plus_beta_allocate(state, j, rng, cfg);
        add_weight(1.0);
        break;
      case Algorithm::GreedyDRetry:
        out = greedy_d_retry_allocate(state, j, rng, cfg);
        add_weight(1.0);
        break;
    }
    if (count_candidacies) {
      for (int b : scratch) ++res.candidacy_counts[(size_t)b];
    }
    ++hist[out.retries_used];
    if (cfg.record_trace) {
      res.trace.push_back(std::move(out));
      res.trace_hashes.push_back(snapshot_hash(state.bins));
    }

    if (j % cfg.n == 0) {
      res.diag.checkpoint_sum_gap_maxabs =
          std::max(res.diag.checkpoint_sum_gap_maxabs, std::fabs(state.sum_est_gap));
      res.diag.checkpoint_nonpos_min =
          std::min(res.diag.checkpoint_nonpos_min,
                   (double)state.nonpositive_count / (double)cfg.n);
    }
  }

  res.diag.checkpoint_sum_gap_final = state.sum_est_gap;
  res.diag.total_weight = total_weight;
  double est_sum = 0.0;
  for (const BinState& b : state.bins) {
    est_sum += b.est_avg;
    res.diag.est_avg_max = std::max(res.diag.est_avg_max, b.est_avg);
  }
  res.diag.est_avg_mean = est_sum / (double)cfg.n;
  if (cfg.variant.kind == VariantKind::MultiDim) {
    if (cfg.variant.md_dist.uniform) {
      res.diag.md_gap = md.max_dimension_gap(state.balls_placed, cfg.variant.populated);
    } else {
      res.diag.md_gap = md.max_dimension_gap(state.balls_placed,
                                             cfg.variant.md_dist.marginals(cfg.variant.dims));
      res.diag.no_claim = true;  // gap bound only covers the uniform law
    }
  }

  res.report = gap_report_from_state(state.bins, total_weight, hist, state.messages_sent);
  res.bins = std::move(state.bins);
  return res;
}

RunResult run_sequential(const SimConfig& cfg) {
  return run_sequential_with_seed(cfg, trial_seed(cfg.seed, 0, 0));
}

}  // namespace allocbench
