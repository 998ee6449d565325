#pragma once

#include <cstdint>
#include <vector>

#include "allocbench/types.hpp"

namespace allocbench::bench {

struct TraceRecord {
  AllocationOutcome outcome;
  uint64_t state_hash = 0;  // post-placement (parallel: post-round) snapshot hash
};

// Straight-line, unoptimized re-implementation of the allocator semantics
// (sequential, weighted, multidim, parallel; both estimate-update modes).
// Shares only the RNG contract and the snapshot-hash metric with the main
// implementation; every allocation decision is coded independently here so
// trace equivalence is a real cross-check. Small instances only.
std::vector<TraceRecord> reference_allocate(const SimConfig& cfg, uint64_t trial_seed);
std::vector<TraceRecord> reference_allocate(const SimConfig& cfg);

// First index at which two traces diverge, or -1 if equivalent. Compares
// destination, retries, found flag and the state-hash chain.
long first_divergence(const std::vector<TraceRecord>& a, const std::vector<TraceRecord>& b);

}  // namespace allocbench::bench
