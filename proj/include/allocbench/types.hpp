#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace allocbench {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { Numbered, Sampled };
enum class Algorithm { Idea, OneChoice, GreedyD, OnePlusBeta, GreedyDRetry };
enum class VariantKind { Unweighted, Weighted, MultiDim, Parallel };
enum class WeightShape { Uniform, TruncatedNormal, TwoPoint };

const char* to_string(Mode m);
const char* to_string(Algorithm a);
const char* to_string(VariantKind v);
const char* to_string(WeightShape s);
Mode mode_from_string(const std::string& s);
Algorithm algorithm_from_string(const std::string& s);

// Ball-weight distribution: mean w_star, every draw within [w_star-k, w_star+k].
struct WeightModel {
  double w_star = 1.0;
  double k = 0.0;
  WeightShape shape = WeightShape::Uniform;
  double p = 0.5;      // TwoPoint: probability of the upper point
  double sigma = 1.0;  // TruncatedNormal: pre-truncation std deviation

  void validate() const;
};

// MultiDim populated-dimension law. Uniform draws an f-subset uniformly (the
// variant the gap bound is stated for); Custom is an arbitrary categorical
// distribution over dimension subsets, accepted as an input generator but
// reported with no gap claim.
struct MdDistribution {
  bool uniform = true;
  std::vector<std::vector<int>> subsets;  // custom: sorted dimension sets
  std::vector<double> weights;            // custom: relative weights, > 0

  double mean_populated(int fallback_f) const;
  std::vector<double> marginals(int dims) const;  // P(dim a populated)
  void validate(int dims) const;
};

struct Variant {
  VariantKind kind = VariantKind::Unweighted;
  WeightModel weight{};
  int dims = 1;       // MultiDim: D
  int populated = 1;  // MultiDim: f
  MdDistribution md_dist{};
};

// Per-bin state: actual load and the bin's running estimate of the system
// average. Loads are doubles even in the unweighted case so the same state
// serves every variant (unweighted increments are exactly 1).
struct BinState {
  double load = 0.0;
  double est_avg = 0.0;
};

// The placement criterion: load minus estimated average.
inline double estimated_gap(const BinState& b) { return b.load - b.est_avg; }

struct SimConfig {
  long n = 0;          // bins
  long m = 0;          // balls
  int d = 2;           // choices per retry
  int gamma_max = -1;  // retry cap; -1 = default ceil(log2 n)
  Mode mode = Mode::Numbered;
  Algorithm algorithm = Algorithm::Idea;
  double beta = 0.5;  // OnePlusBeta only
  int retry_cap = 1;  // GreedyDRetry only
  uint64_t seed = 1;
  int trials = 1;
  Variant variant{};
  double epsilon = 0.05;       // sampled-mode decision tolerance
  int sample_size_large = 8;   // sampled-mode constant-phase sample size
  bool record_trace = false;

  int effective_gamma_max() const;
  int sample_size_small() const;  // ceil(log2 n)
  void validate() const;          // throws ConfigError
};

// Record of one ball's allocation: one candidate set per retry, the draw
// count, and whether the retry loop broke on a nonpositive estimated gap.
struct AllocationOutcome {
  long ball_index = 0;
  int retries_used = 0;
  std::vector<std::vector<int>> candidates;
  int destination = -1;
  bool found_nonpositive = false;
};

struct GapReport {
  double max_load = 0.0;
  double min_load = 0.0;
  double true_avg = 0.0;  // total weight placed / n
  double gap = 0.0;       // max_load - true_avg
  double est_avg_max_error = 0.0;
  double est_avg_variance = 0.0;
  double nonpositive_gap_fraction = 0.0;
  std::map<int, long> retry_histogram;
  double mean_retries = 0.0;
  double sum_est_gap = 0.0;
  long messages = 0;
};

inline long ceil_div(long a, long b) { return (a + b - 1) / b; }

}  // namespace allocbench
