#include "allocbench/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace allocbench {

ParallelState::ParallelState(long n, long m) : system(n) {
  unplaced.resize((size_t)m);
  for (long i = 0; i < m; ++i) unplaced[(size_t)i] = i + 1;
}

RoundResult run_parallel_round(ParallelState& state, const RngContract& rng,
                               const SimConfig& cfg) {
  if (state.unplaced.empty()) throw ConfigError("run_parallel_round: no unplaced balls");
  const long n = state.system.n();
  const long round = state.round + 1;
  const uint64_t round_seed = rng.round_seed(round);
  EstimateUpdatePolicy policy = EstimateUpdatePolicy::from_config(cfg);
  const int gamma = cfg.effective_gamma_max();

  // Step 2/3: balls learn round-start estimated gaps.
  std::vector<double> snapshot((size_t)n);
  for (long b = 0; b < n; ++b) snapshot[(size_t)b] = estimated_gap(state.system.bins[(size_t)b]);

  RoundResult res;
  // Steps 1/4: each ball retries against the snapshot and confirms (C1) its
  // minimum-gap candidate.
  std::vector<std::vector<long>> c1((size_t)n);
  std::vector<AllocationOutcome> pending((size_t)0);
  pending.reserve(state.unplaced.size());
  std::vector<int> scratch;
  for (long ball : state.unplaced) {
    Stream cand = Stream(derive_seed(round_seed, (uint64_t)ball, kPurposeCandidates));
    Stream tie = Stream(derive_seed(round_seed, (uint64_t)ball, kPurposeTieBreak));
    AllocationOutcome out;
    out.ball_index = ball;
    auto gap_of = [&snapshot](int b) { return snapshot[(size_t)b]; };
    detail::Selection sel = detail::select_destination(
        cand, tie, n, cfg.d, gamma, gap_of, scratch, cfg.record_trace ? &out.candidates : nullptr);
    out.retries_used = sel.retries_used;
    out.found_nonpositive = sel.found_nonpositive;
    out.destination = sel.destination;
    res.messages.query += (long)cfg.d * sel.retries_used;
    res.messages.reply += (long)cfg.d * sel.retries_used;
    res.messages.c1 += 1;
    if (!cfg.record_trace) {
      // keep the final set for the INC fan-out
      out.candidates.push_back(scratch);
    }
    c1[(size_t)sel.destination].push_back(ball);
    pending.push_back(std::move(out));
  }

  // Step 5: every bin with confirmations accepts exactly one, uniformly.
  std::vector<long> next_unplaced;
  std::vector<char> accepted_flag(pending.size(), 0);
  for (long b = 0; b < n; ++b) {
    auto& list = c1[(size_t)b];
    if (list.empty()) continue;
    size_t pick = 0;
    if (list.size() > 1) {
      Stream accept = Stream(derive_seed(round_seed, (uint64_t)b, kPurposeAccept));
      pick = (size_t)accept.bounded(list.size());
    }
    for (size_t q = 0; q < list.size(); ++q) {
      if (q == pick) {
        state.system.add_load((int)b, 1.0);
        res.messages.c2 += 1;
        res.placed.push_back(list[q]);
      } else {
        next_unplaced.push_back(list[q]);
      }
    }
  }
  std::sort(res.placed.begin(), res.placed.end());
  std::sort(next_unplaced.begin(), next_unplaced.end());

  // Steps 6/7: accepted balls INC their candidate sets; increments pass the
  // sampled-mode gate. balls_placed stays at its round-start value until the
  // round ends, so every decision in this round samples the same phase.
  const long sampling_before = state.system.messages_sent;
  for (AllocationOutcome& out : pending) {
    bool accepted = std::binary_search(res.placed.begin(), res.placed.end(), out.ball_index);
    size_t idx = (size_t)(&out - pending.data());
    accepted_flag[idx] = accepted ? 1 : 0;
    if (!accepted) continue;
    const std::vector<int>& final_set = out.candidates.back();
    res.messages.inc += (long)final_set.size();
    Stream samp = Stream(derive_seed(round_seed, (uint64_t)out.ball_index, kPurposeSampling));
    const double inc = 1.0 / cfg.d;
    for (int b : final_set) {
      const double pre = state.system.bins[(size_t)b].est_avg;
      const double post = pre + inc;
      const long alpha = (long)std::ceil(pre);
      bool allow = true;
      if (alpha >= 1 && pre <= (double)alpha && (double)alpha < post)
        allow = sampled_increment_decision(state.system, b, samp, policy, alpha, 1.0);
      if (allow) state.system.add_est(b, inc);
    }
  }
  res.messages.sampling = state.system.messages_sent - sampling_before;

  // Deadlock freedom: at least one confirmation is always accepted.
  if (res.placed.empty()) ++res.violations;
  state.system.balls_placed += (long)res.placed.size();
  state.round = round;
  state.unplaced = std::move(next_unplaced);
  state.messages.add(res.messages);

  for (size_t q = 0; q < pending.size(); ++q) {
    if (accepted_flag[q]) res.outcomes.push_back(std::move(pending[q]));
  }
  return res;
}

RunResult run_parallel_with_seed(const SimConfig& cfg, uint64_t seed) {
  cfg.validate();
  if (cfg.variant.kind != VariantKind::Parallel)
    throw ConfigError("run_parallel: config is not the parallel variant");
  if (cfg.mode != Mode::Sampled)
    throw ConfigError("run_parallel: parallel runs use the sampled estimate policy");

  RngContract rng{seed};
  ParallelState state(cfg.n, cfg.m);
  RunResult res;
  std::map<int, long> hist;
  std::vector<AllocationOutcome> trace;
  std::vector<uint64_t> hashes;

  while (!state.unplaced.empty()) {
    RoundResult round = run_parallel_round(state, rng, cfg);
    res.diag.round_violations += round.violations;
    if (round.placed.empty()) break;  // deadlock guard; recorded as violation
    uint64_t h = cfg.record_trace ? snapshot_hash(state.system.bins) : 0;
    for (AllocationOutcome& out : round.outcomes) {
      ++hist[out.retries_used];
      if (cfg.record_trace) {
        trace.push_back(std::move(out));
        hashes.push_back(h);
      }
    }
  }

  res.diag.rounds = state.round;
  res.diag.msg_query = state.messages.query;
  res.diag.msg_reply = state.messages.reply;
  res.diag.msg_c1 = state.messages.c1;
  res.diag.msg_c2 = state.messages.c2;
  res.diag.msg_inc = state.messages.inc;
  res.diag.msg_sampling = state.messages.sampling;
  res.diag.total_weight = (double)cfg.m;
  double est_sum = 0.0;
  for (const BinState& b : state.system.bins) {
    est_sum += b.est_avg;
    res.diag.est_avg_max = std::max(res.diag.est_avg_max, b.est_avg);
  }
  res.diag.est_avg_mean = est_sum / (double)cfg.n;
  res.report = gap_report_from_state(state.system.bins, (double)cfg.m, hist,
                                     state.messages.total());
  res.bins = state.system.bins;
  res.trace = std::move(trace);
  res.trace_hashes = std::move(hashes);
  return res;
}

RunResult run_parallel(const SimConfig& cfg) {
  return run_parallel_with_seed(cfg, trial_seed(cfg.seed, 0, 0));
}

}  // namespace allocbench
