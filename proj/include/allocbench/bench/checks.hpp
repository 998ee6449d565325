#pragma once

#include <map>
#include <string>
#include <vector>

#include "allocbench/core.hpp"
#include "allocbench/types.hpp"

namespace allocbench::bench {

// One verdict of the statistics engine. `claim` states the property being
// tested in plain terms; `band` the accepted range; `observed` the measured
// statistic.
struct CheckResult {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  std::string band;
  std::string claim;
  std::string detail;
};

// Candidate-selection balance: per-bin final-set candidacies must average
// md/n (an exact identity) and no bin may exceed (md/n)*log2(n) in any trial.
CheckResult check_choice_statistics(const std::vector<std::vector<long>>& per_trial_counts,
                                    long n, long m, int d);

// Constant-gap claim: a single bound C0 caps the max observed gap at every
// load ratio, and the per-ratio mean gaps must not spread more than
// `max_mean_spread`.
CheckResult check_gap_theorem(const std::map<long, ReportAggregate>& by_ratio, double c0 = 4.0,
                              double max_mean_spread = 1.5);

// Expected retries: observed mean within tolerance of 1 + 1/(2^d - 1) and
// strictly below 2.
CheckResult check_retry_expectation(double observed_mean_retries, int d);
double expected_retries(int d);

// Retry histogram against the geometric-like decay p_i = (2^d-1)/2^(i*d),
// chi-square at a loose alpha.
CheckResult check_retry_distribution(const std::map<int, long>& histogram, int d);

// Sampling communication: total sampled-mode poll messages per run at most
// slack*n*d.
CheckResult check_sampling_cost(const std::vector<long>& messages_per_trial, long n, int d,
                                double slack = 4.0);

// Loose upper quantiles of the chi-square distribution for the df values the
// checks use (0.01 and 0.001 tails).
double chi_square_critical(int df, double alpha);

}  // namespace allocbench::bench
