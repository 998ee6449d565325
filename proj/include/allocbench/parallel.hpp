#pragma once

#include <vector>

#include "allocbench/idea.hpp"
#include "allocbench/rng.hpp"
#include "allocbench/types.hpp"

namespace allocbench {

// Per-kind tallies of the round protocol's message flow.
struct MessageCounters {
  long query = 0;
  long reply = 0;
  long c1 = 0;
  long c2 = 0;
  long inc = 0;
  long sampling = 0;

  long total() const { return query + reply + c1 + c2 + inc + sampling; }
  void add(const MessageCounters& o) {
    query += o.query;
    reply += o.reply;
    c1 += o.c1;
    c2 += o.c2;
    inc += o.inc;
    sampling += o.sampling;
  }
};

struct ParallelState {
  SystemState system;          // bins, balls_placed, sampling message count
  std::vector<long> unplaced;  // ball ids, ascending
  long round = 0;              // completed rounds
  MessageCounters messages;

  ParallelState(long n, long m);
};

struct RoundResult {
  std::vector<long> placed;  // ball ids accepted this round, ascending
  MessageCounters messages;  // this round only
  long violations = 0;       // one-ball-per-bin / progress check failures
  // Final-round allocation record per placed ball (parallel trace rows).
  std::vector<AllocationOutcome> outcomes;
};

// One synchronous round: every unplaced ball runs the retry loop against
// round-start gap snapshots and targets its minimum-gap bin (C1); each bin
// accepts one C1 uniformly (C2); accepted balls INC all d candidates, whose
// estimates update under the sampled-mode gate. Estimate state mutates only
// in the INC phase, so within a round all decisions see the same snapshot.
RoundResult run_parallel_round(ParallelState& state, const RngContract& rng,
                               const SimConfig& cfg);

// Runs rounds until every ball is placed.
RunResult run_parallel(const SimConfig& cfg);
RunResult run_parallel_with_seed(const SimConfig& cfg, uint64_t trial_seed);

}  // namespace allocbench
