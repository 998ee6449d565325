#include "allocbench/core.hpp"

#include <algorithm>
#include <cmath>

namespace allocbench {

const char* to_string(Mode m) { return m == Mode::Numbered ? "numbered" : "sampled"; }

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Idea: return "idea";
    case Algorithm::OneChoice: return "one";
    case Algorithm::GreedyD: return "greedy";
    case Algorithm::OnePlusBeta: return "beta";
    case Algorithm::GreedyDRetry: return "greedy-retry";
  }
  return "?";
}

const char* to_string(VariantKind v) {
  switch (v) {
    case VariantKind::Unweighted: return "unweighted";
    case VariantKind::Weighted: return "weighted";
    case VariantKind::MultiDim: return "multidim";
    case VariantKind::Parallel: return "parallel";
  }
  return "?";
}

const char* to_string(WeightShape s) {
  switch (s) {
    case WeightShape::Uniform: return "uniform";
    case WeightShape::TruncatedNormal: return "tnormal";
    case WeightShape::TwoPoint: return "twopoint";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  if (s == "numbered") return Mode::Numbered;
  if (s == "sampled") return Mode::Sampled;
  throw ConfigError("unknown mode: " + s);
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "idea") return Algorithm::Idea;
  if (s == "one") return Algorithm::OneChoice;
  if (s == "greedy") return Algorithm::GreedyD;
  if (s == "beta") return Algorithm::OnePlusBeta;
  if (s == "greedy-retry") return Algorithm::GreedyDRetry;
  throw ConfigError("unknown algorithm: " + s);
}

void WeightModel::validate() const {
  if (!(w_star > 0)) throw ConfigError("weight model: w_star must be positive");
  if (k < 0) throw ConfigError("weight model: k must be nonnegative");
  if (!(k < w_star)) throw ConfigError("weight model: need k < w_star so weights stay positive");
  if (shape == WeightShape::TwoPoint && !(p > 0 && p < 1))
    throw ConfigError("weight model: twopoint p must be in (0,1)");
  if (shape == WeightShape::TruncatedNormal && !(sigma > 0))
    throw ConfigError("weight model: tnormal sigma must be positive");
}

int SimConfig::sample_size_small() const {
  if (n <= 2) return 1;
  return (int)std::ceil(std::log2((double)n));
}

int SimConfig::effective_gamma_max() const {
  if (gamma_max >= 0) return gamma_max;
  if (n <= 1) return 1;
  return (int)std::ceil(std::log2((double)n));
}

void SimConfig::validate() const {
  if (n < 1) throw ConfigError("n must be positive");
  if (m < 0) throw ConfigError("m must be nonnegative");
  if (d < 1) throw ConfigError("d must be >= 1");
  if (d > n) throw ConfigError("d must not exceed n");
  if (trials < 1) throw ConfigError("trials must be positive");
  if (!(epsilon > 0)) throw ConfigError("epsilon must be positive");
  if (sample_size_large < 1) throw ConfigError("sample_size_large must be >= 1");
  if (algorithm == Algorithm::OnePlusBeta && !(beta > 0 && beta < 1))
    throw ConfigError("beta must be in (0,1)");
  if (algorithm == Algorithm::GreedyDRetry && retry_cap < 1)
    throw ConfigError("retry_cap must be >= 1");
  switch (variant.kind) {
    case VariantKind::Unweighted:
      break;
    case VariantKind::Weighted:
      variant.weight.validate();
      if (algorithm != Algorithm::Idea)
        throw ConfigError("weighted variant requires algorithm=idea");
      break;
    case VariantKind::MultiDim:
      if (variant.dims < 1) throw ConfigError("multidim: dims must be >= 1");
      if (variant.populated < 1 || variant.populated > variant.dims)
        throw ConfigError("multidim: need 1 <= populated <= dims");
      variant.md_dist.validate(variant.dims);
      if (algorithm != Algorithm::Idea)
        throw ConfigError("multidim variant requires algorithm=idea");
      break;
    case VariantKind::Parallel:
      if (algorithm != Algorithm::Idea)
        throw ConfigError("parallel variant requires algorithm=idea");
      break;
  }
}

void choose_candidates(Stream& rng, long n, int d, std::vector<int>& out) {
  if (d < 1 || (long)d > n) throw ConfigError("choose_candidates: need 1 <= d <= n");
  out.clear();
  // Floyd's algorithm: for t = n-d .. n-1 draw r in [0,t]; if r already
  // picked, take t instead. Every d-subset is equiprobable.
  for (long t = n - d; t < n; ++t) {
    int r = (int)rng.bounded((uint64_t)(t + 1));
    bool dup = false;
    for (int q : out) {
      if (q == r) {
        dup = true;
        break;
      }
    }
    out.push_back(dup ? (int)t : r);
  }
  std::sort(out.begin(), out.end());
}

std::vector<int> choose_candidates(Stream& rng, long n, int d) {
  std::vector<int> out;
  choose_candidates(rng, n, d, out);
  return out;
}

namespace {

struct Kahan {
  double sum = 0.0, c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

GapReport gap_report_from_state(const std::vector<BinState>& bins, double total_weight,
                                const std::map<int, long>& retry_histogram, long messages) {
  if (bins.empty()) throw ConfigError("gap_report: bin list is empty");
  const long n = (long)bins.size();
  GapReport r;
  r.true_avg = total_weight / (double)n;
  r.max_load = bins[0].load;
  r.min_load = bins[0].load;
  Kahan sum_gap;
  Kahan est_sum;
  long nonpos = 0;
  for (const BinState& b : bins) {
    r.max_load = std::max(r.max_load, b.load);
    r.min_load = std::min(r.min_load, b.load);
    sum_gap.add(b.load - b.est_avg);
    est_sum.add(b.est_avg);
    r.est_avg_max_error = std::max(r.est_avg_max_error, std::fabs(b.est_avg - r.true_avg));
    if (estimated_gap(b) <= 0) ++nonpos;
  }
  r.gap = r.max_load - r.true_avg;
  r.sum_est_gap = sum_gap.sum;
  r.nonpositive_gap_fraction = (double)nonpos / (double)n;
  const double est_mean = est_sum.sum / (double)n;
  if (n > 1) {
    Kahan var;
    for (const BinState& b : bins) var.add((b.est_avg - est_mean) * (b.est_avg - est_mean));
    r.est_avg_variance = var.sum / (double)(n - 1);
  }
  long balls = 0, draws = 0;
  for (const auto& [retries, count] : retry_histogram) {
    balls += count;
    draws += (long)retries * count;
  }
  r.retry_histogram = retry_histogram;
  r.mean_retries = balls > 0 ? (double)draws / (double)balls : 0.0;
  r.messages = messages;
  return r;
}

GapReport gap_report(const std::vector<BinState>& bins,
                     const std::vector<AllocationOutcome>& outcomes, double total_weight,
                     long messages) {
  std::map<int, long> hist;
  for (const AllocationOutcome& o : outcomes) ++hist[o.retries_used];
  return gap_report_from_state(bins, total_weight, hist, messages);
}

namespace {

constexpr int64_t kQuantum = 1000000000;  // 1e-9 grid

int64_t quantize(double x) { return (int64_t)std::llround(x * (double)kQuantum); }

}  // namespace

void ReportAggregate::add(const GapReport& r) {
  if (trials == 0) {
    max_load = r.max_load;
    min_load = r.min_load;
  } else {
    max_load = std::max(max_load, r.max_load);
    min_load = std::min(min_load, r.min_load);
  }
  gap_max = trials == 0 ? r.gap : std::max(gap_max, r.gap);
  gap_sum_q += quantize(r.gap);
  mean_retries_sum_q += quantize(r.mean_retries);
  sum_est_gap_sum_q += quantize(r.sum_est_gap);
  messages_total += r.messages;
  ++trials;
}

void ReportAggregate::merge(const ReportAggregate& o) {
  if (o.trials == 0) return;
  if (trials == 0) {
    *this = o;
    return;
  }
  max_load = std::max(max_load, o.max_load);
  min_load = std::min(min_load, o.min_load);
  gap_max = std::max(gap_max, o.gap_max);
  gap_sum_q += o.gap_sum_q;
  mean_retries_sum_q += o.mean_retries_sum_q;
  sum_est_gap_sum_q += o.sum_est_gap_sum_q;
  messages_total += o.messages_total;
  trials += o.trials;
}

double ReportAggregate::gap_mean() const {
  return trials == 0 ? 0.0 : (double)gap_sum_q / (double)kQuantum / (double)trials;
}

double ReportAggregate::mean_retries_mean() const {
  return trials == 0 ? 0.0 : (double)mean_retries_sum_q / (double)kQuantum / (double)trials;
}

uint64_t snapshot_hash(const std::vector<BinState>& bins) {
  uint64_t h = 1469598103934665603ULL;  // FNV offset basis
  auto eat = [&h](int64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (uint64_t)(v >> (i * 8)) & 0xffu;
      h *= 1099511628211ULL;  // FNV prime
    }
  };
  for (const BinState& b : bins) {
    eat(quantize(b.load));
    eat(quantize(b.est_avg));
  }
  return h;
}

}  // namespace allocbench
