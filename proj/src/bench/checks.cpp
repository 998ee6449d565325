#include "allocbench/bench/checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace allocbench::bench {

double chi_square_critical(int df, double alpha) {
  // Wilson-Hilferty approximation; plenty for test thresholds.
  double z;
  if (alpha <= 0.001)
    z = 3.090232;
  else if (alpha <= 0.01)
    z = 2.326348;
  else if (alpha <= 0.05)
    z = 1.644854;
  else
    z = 1.281552;  // 0.10
  double k = (double)df;
  double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
  return k * t * t * t;
}

double expected_retries(int d) { return 1.0 + 1.0 / (std::pow(2.0, d) - 1.0); }

CheckResult check_choice_statistics(const std::vector<std::vector<long>>& per_trial_counts,
                                    long n, long m, int d) {
  CheckResult r;
  r.name = "choice-stats";
  r.claim = "each bin is a final-set candidate m*d/n times on average, never more than "
            "(m*d/n)*log2(n) in a trial";
  const double expected = (double)m * d / (double)n;
  const double log2n = n > 1 ? std::log2((double)n) : 1.0;
  const double max_allowed = expected * log2n;
  // SE of the mean over bins for per-bin counts ~ Binomial(m, d/n).
  const double per_bin_var = (double)m * ((double)d / n) * (1.0 - (double)d / n);
  const long trials = (long)per_trial_counts.size();
  const double se_mean =
      std::sqrt(per_bin_var / ((double)n * std::max<long>(trials, 1)));

  double worst_mean_err = 0.0;
  long worst_count = 0;
  for (const auto& counts : per_trial_counts) {
    long total = 0;
    for (long c : counts) {
      total += c;
      worst_count = std::max(worst_count, c);
    }
    worst_mean_err =
        std::max(worst_mean_err, std::fabs((double)total / (double)n - expected));
  }
  std::ostringstream band;
  band << "mean " << expected << " +- " << 3.0 * se_mean << ", max <= " << max_allowed;
  r.band = band.str();
  r.observed = (double)worst_count;
  r.pass = worst_mean_err <= 3.0 * se_mean && (double)worst_count <= max_allowed;
  std::ostringstream det;
  det << "worst per-trial mean error " << worst_mean_err << ", max per-bin count "
      << worst_count;
  r.detail = det.str();
  return r;
}

CheckResult check_gap_theorem(const std::map<long, ReportAggregate>& by_ratio, double c0,
                              double max_mean_spread) {
  CheckResult r;
  r.name = "gap-theorem";
  r.claim = "max load stays within a single constant of ceil(m/n), independent of m/n";
  double worst_gap = 0.0;
  double mean_lo = 0.0, mean_hi = 0.0;
  bool first = true;
  std::ostringstream det;
  for (const auto& [ratio, agg] : by_ratio) {
    worst_gap = std::max(worst_gap, agg.gap_max);
    double mean = agg.gap_mean();
    if (first) {
      mean_lo = mean_hi = mean;
      first = false;
    } else {
      mean_lo = std::min(mean_lo, mean);
      mean_hi = std::max(mean_hi, mean);
    }
    det << "m/n=" << ratio << ": max " << agg.gap_max << " mean " << mean << "; ";
  }
  std::ostringstream band;
  band << "max gap <= " << c0 << ", mean spread <= " << max_mean_spread;
  r.band = band.str();
  r.observed = worst_gap;
  r.pass = !first && worst_gap <= c0 && (mean_hi - mean_lo) <= max_mean_spread;
  det << "mean spread " << (mean_hi - mean_lo);
  r.detail = det.str();
  return r;
}

CheckResult check_retry_expectation(double observed_mean_retries, int d) {
  CheckResult r;
  r.name = "retry-expectation";
  r.claim = "expected candidate draws per ball approach 1 + 1/(2^d - 1), below 2";
  const double expected = expected_retries(d);
  const double tol = d == 3 ? 0.1 : 0.15;
  std::ostringstream band;
  band << expected << " +- " << tol << " and < 2";
  r.band = band.str();
  r.observed = observed_mean_retries;
  r.pass = std::fabs(observed_mean_retries - expected) <= tol && observed_mean_retries < 2.0;
  return r;
}

CheckResult check_retry_distribution(const std::map<int, long>& histogram, int d) {
  CheckResult r;
  r.name = "retry-distribution";
  r.claim = "retry counts decay like p_i = (2^d - 1)/2^(i*d)";
  long total = 0;
  int max_retry = 0;
  for (const auto& [retries, count] : histogram) {
    total += count;
    max_retry = std::max(max_retry, retries);
  }
  if (total == 0) {
    r.pass = true;
    r.band = "no balls";
    return r;
  }
  // Bucket i = 1..K-1 individually, last bucket collects the tail so every
  // expected count stays comfortably above 5.
  const double pd = std::pow(2.0, d);
  int K = 2;
  double tail = 1.0 / pd;  // P(retries > 1)
  while ((double)total * tail / pd >= 10.0 && K < max_retry + 1 && K < 12) {
    tail /= pd;
    ++K;
  }
  double chi2 = 0.0;
  double cum_p = 0.0;
  for (int i = 1; i < K; ++i) {
    double p = (pd - 1.0) / std::pow(pd, i);
    cum_p += p;
    long observed = histogram.count(i) ? histogram.at(i) : 0;
    double expect = (double)total * p;
    chi2 += (observed - expect) * (observed - expect) / expect;
  }
  long tail_obs = 0;
  for (const auto& [retries, count] : histogram) {
    if (retries >= K) tail_obs += count;
  }
  double tail_exp = (double)total * (1.0 - cum_p);
  if (tail_exp > 0) chi2 += (tail_obs - tail_exp) * (tail_obs - tail_exp) / tail_exp;
  const int df = K - 1;
  const double crit = chi_square_critical(df, 0.001);
  std::ostringstream band;
  band << "chi2(" << df << ") <= " << crit << " at alpha=0.001";
  r.band = band.str();
  r.observed = chi2;
  r.pass = chi2 <= crit;
  return r;
}

CheckResult check_sampling_cost(const std::vector<long>& messages_per_trial, long n, int d,
                                double slack) {
  CheckResult r;
  r.name = "sampling-cost";
  r.claim = "total peer-poll messages per run stay within a small multiple of n*d";
  const double bound = slack * (double)n * d;
  long worst = 0;
  for (long msg : messages_per_trial) worst = std::max(worst, msg);
  std::ostringstream band;
  band << "<= " << bound;
  r.band = band.str();
  r.observed = (double)worst;
  r.pass = (double)worst <= bound;
  return r;
}

}  // namespace allocbench::bench
