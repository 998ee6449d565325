#pragma once

#include <cstdint>
#include <vector>

namespace allocbench {

// splitmix64 finalizer (Steele/Lea/Flood constants). Used both as the core
// generator step and as the seed-derivation mixer, so every stream in the
// project is reproducible from a single 64-bit seed on any platform.
constexpr uint64_t mix64(uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Derives an independent stream seed from a parent seed and up to three
// words (cell index, trial index, purpose tag, ...). Fixed documented
// mixing function per the reproducibility contract.
constexpr uint64_t derive_seed(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
  uint64_t h = seed;
  h = mix64(h + kGolden + a);
  h = mix64(h + kGolden + b);
  h = mix64(h + kGolden + c);
  return h;
}

// A splitmix64 stream: the project's deterministic RNG.
class Stream {
 public:
  explicit Stream(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += kGolden;
    return mix64(state_);
  }

  // Unbiased draw in [0, bound) via Lemire's multiply-with-rejection.
  uint64_t bounded(uint64_t bound) {
    unsigned __int128 prod = (unsigned __int128)next() * bound;
    uint64_t low = (uint64_t)prod;
    if (low < bound) {
      uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        prod = (unsigned __int128)next() * bound;
        low = (uint64_t)prod;
      }
    }
    return (uint64_t)(prod >> 64);
  }

  // Uniform double in [0,1) with 53 random bits.
  double real01() { return (double)(next() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

// Uniform random d-subset of {0,...,n-1} by Floyd's algorithm: exactly d
// bounded draws, no O(n) scratch. Output sorted ascending so downstream
// iteration order is canonical.
void sample_subset(Stream& rng, long n, int d, std::vector<int>& out);

// Purpose tags for per-ball / per-round substreams. Keeping each concern on
// its own stream means e.g. a weighted run consumes weight draws without
// shifting the candidate sequence, so paired-seed comparisons stay aligned.
enum Purpose : uint64_t {
  kPurposeCandidates = 1,
  kPurposeTieBreak = 2,
  kPurposeCoin = 3,
  kPurposeWeight = 4,
  kPurposeDims = 5,
  kPurposeSampling = 6,
  kPurposeAccept = 7,
  kPurposeRound = 8,
  kPurposeTrial = 9,
};

// The seed-plus-derivation-scheme handed to allocators. Same trial seed and
// same call pattern reproduce identical draws everywhere.
struct RngContract {
  uint64_t trial_seed = 0;

  Stream ball_stream(long ball_index, Purpose p) const {
    return Stream(derive_seed(trial_seed, (uint64_t)ball_index, (uint64_t)p));
  }
  uint64_t round_seed(long round) const {
    return derive_seed(trial_seed, (uint64_t)round, kPurposeRound);
  }
};

inline uint64_t trial_seed(uint64_t config_seed, long cell_index, int trial_index) {
  return derive_seed(config_seed, (uint64_t)cell_index, (uint64_t)trial_index, kPurposeTrial);
}

}  // namespace allocbench
