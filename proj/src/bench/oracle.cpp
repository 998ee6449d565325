#include "allocbench/bench/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "allocbench/core.hpp"  // snapshot_hash only
#include "allocbench/rng.hpp"

namespace allocbench::bench {

namespace {

constexpr long kMaxBins = 64;
constexpr long kMaxBalls = 1000;

// Independent transliteration of the documented subset draw (Floyd).
std::vector<int> floyd_subset(Stream& rng, long n, int d) {
  std::vector<int> out;
  for (long t = n - d; t < n; ++t) {
    int r = (int)rng.bounded((uint64_t)(t + 1));
    bool seen = false;
    for (int q : out) seen = seen || q == r;
    out.push_back(seen ? (int)t : r);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double draw_weight(const WeightModel& model, Stream& rng) {
  if (model.k == 0.0) return model.w_star;
  if (model.shape == WeightShape::Uniform)
    return (model.w_star - model.k) + rng.real01() * (2.0 * model.k);
  if (model.shape == WeightShape::TwoPoint) {
    double up = model.k * std::min(1.0, (1.0 - model.p) / model.p);
    double down = model.k * std::min(1.0, model.p / (1.0 - model.p));
    return rng.real01() < model.p ? model.w_star + up : model.w_star - down;
  }
  while (true) {
    double u1 = rng.real01();
    double u2 = rng.real01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    double w = model.w_star + model.sigma * z;
    if (w >= model.w_star - model.k && w <= model.w_star + model.k) return w;
  }
}

struct OracleBins {
  std::vector<double> load;
  std::vector<double> est;
  long balls_placed = 0;

  std::vector<BinState> as_bin_states() const {
    std::vector<BinState> out(load.size());
    for (size_t i = 0; i < load.size(); ++i) out[i] = {load[i], est[i]};
    return out;
  }
};

// Pick the minimum of gap() over sorted candidates, ties uniform.
template <typename F>
int min_by(const std::vector<int>& cands, Stream& tie, F gap) {
  double best = gap(cands[0]);
  int nties = 1;
  for (size_t i = 1; i < cands.size(); ++i) {
    double g = gap(cands[i]);
    if (g < best) {
      best = g;
      nties = 1;
    } else if (g == best) {
      ++nties;
    }
  }
  long pick = nties > 1 ? (long)tie.bounded((uint64_t)nties) : 0;
  for (int c : cands) {
    if (gap(c) == best) {
      if (pick == 0) return c;
      --pick;
    }
  }
  return cands[0];
}

bool sampled_gate(OracleBins& bins, int b, long alpha, double unit, Stream& samp,
                  const SimConfig& cfg) {
  long n = (long)bins.load.size();
  long small = cfg.sample_size_small();
  long phase_threshold = n * small;
  long want = bins.balls_placed < phase_threshold ? small : cfg.sample_size_large;
  int N = (int)std::min(want, n - 1);
  if (N < 1) return true;
  std::vector<int> peers = floyd_subset(samp, n - 1, N);
  double sum = 0.0;
  for (int q : peers) sum += bins.est[(size_t)(q >= b ? q + 1 : q)];
  return sum / N >= ((double)alpha - cfg.epsilon) * unit;
}

void update_estimates(OracleBins& bins, const std::vector<int>& cands, long j, double weight,
                      double unit, const SimConfig& cfg, Stream& samp) {
  long n = (long)bins.load.size();
  double inc = weight / cfg.d;
  if (cfg.mode == Mode::Numbered) {
    double cap = (double)((j + n - 1) / n) * unit;
    for (int b : cands) {
      if (bins.est[(size_t)b] <= cap) bins.est[(size_t)b] += inc;
    }
    return;
  }
  for (int b : cands) {
    double pre = bins.est[(size_t)b];
    double post = pre + inc;
    long alpha = (long)std::ceil(pre / unit);
    bool allow = true;
    if (alpha >= 1 && pre <= (double)alpha * unit && (double)alpha * unit < post)
      allow = sampled_gate(bins, b, alpha, unit, samp, cfg);
    if (allow) bins.est[(size_t)b] = post;
  }
}

std::vector<TraceRecord> sequential_reference(const SimConfig& cfg, uint64_t seed) {
  RngContract rng{seed};
  OracleBins bins;
  bins.load.assign((size_t)cfg.n, 0.0);
  bins.est.assign((size_t)cfg.n, 0.0);
  std::vector<TraceRecord> trace;

  for (long j = 1; j <= cfg.m; ++j) {
    double weight = 1.0;
    double unit = 1.0;
    std::vector<int> ball_dims;
    if (cfg.variant.kind == VariantKind::Weighted) {
      Stream ws = rng.ball_stream(j, kPurposeWeight);
      weight = draw_weight(cfg.variant.weight, ws);
      unit = cfg.variant.weight.w_star;
    } else if (cfg.variant.kind == VariantKind::MultiDim) {
      Stream ds = rng.ball_stream(j, kPurposeDims);
      if (cfg.variant.md_dist.uniform) {
        ball_dims = floyd_subset(ds, cfg.variant.dims, cfg.variant.populated);
      } else {
        const MdDistribution& dist = cfg.variant.md_dist;
        double total = 0;
        for (double w : dist.weights) total += w;
        double u = ds.real01() * total;
        double acc = 0;
        size_t pick = dist.subsets.size() - 1;
        for (size_t i = 0; i < dist.subsets.size(); ++i) {
          acc += dist.weights[i];
          if (u < acc) {
            pick = i;
            break;
          }
        }
        ball_dims = dist.subsets[pick];
      }
      weight = (double)ball_dims.size();
      unit = cfg.variant.md_dist.mean_populated(cfg.variant.populated);
    }

    Stream cand = rng.ball_stream(j, kPurposeCandidates);
    Stream tie = rng.ball_stream(j, kPurposeTieBreak);
    int gamma = cfg.effective_gamma_max();
    TraceRecord rec;
    rec.outcome.ball_index = j;
    std::vector<int> cands;
    int draws = 0;
    bool found = false;
    while (true) {
      cands = floyd_subset(cand, cfg.n, cfg.d);
      ++draws;
      rec.outcome.candidates.push_back(cands);
      found = false;
      for (int b : cands) {
        if (bins.load[(size_t)b] - bins.est[(size_t)b] <= 0.0) found = true;
      }
      if (found || draws > gamma) break;
    }
    auto gap = [&bins](int b) { return bins.load[(size_t)b] - bins.est[(size_t)b]; };
    int dest = min_by(cands, tie, gap);
    bins.load[(size_t)dest] += weight;

    Stream samp = rng.ball_stream(j, kPurposeSampling);
    update_estimates(bins, cands, j, weight, unit, cfg, samp);
    bins.balls_placed = j;

    rec.outcome.retries_used = draws;
    rec.outcome.found_nonpositive = found;
    rec.outcome.destination = dest;
    rec.state_hash = snapshot_hash(bins.as_bin_states());
    trace.push_back(std::move(rec));
  }
  return trace;
}

std::vector<TraceRecord> parallel_reference(const SimConfig& cfg, uint64_t seed) {
  RngContract rng{seed};
  OracleBins bins;
  bins.load.assign((size_t)cfg.n, 0.0);
  bins.est.assign((size_t)cfg.n, 0.0);
  std::vector<long> unplaced;
  for (long i = 1; i <= cfg.m; ++i) unplaced.push_back(i);
  std::vector<TraceRecord> trace;
  long round = 0;

  while (!unplaced.empty()) {
    ++round;
    uint64_t rseed = rng.round_seed(round);
    std::vector<double> snap((size_t)cfg.n);
    for (long b = 0; b < cfg.n; ++b) snap[(size_t)b] = bins.load[(size_t)b] - bins.est[(size_t)b];

    std::map<int, std::vector<long>> c1;
    std::map<long, TraceRecord> pending;
    for (long ball : unplaced) {
      Stream cand(derive_seed(rseed, (uint64_t)ball, kPurposeCandidates));
      Stream tie(derive_seed(rseed, (uint64_t)ball, kPurposeTieBreak));
      int gamma = cfg.effective_gamma_max();
      TraceRecord rec;
      rec.outcome.ball_index = ball;
      std::vector<int> cands;
      int draws = 0;
      bool found = false;
      while (true) {
        cands = floyd_subset(cand, cfg.n, cfg.d);
        ++draws;
        rec.outcome.candidates.push_back(cands);
        found = false;
        for (int b : cands) found = found || snap[(size_t)b] <= 0.0;
        if (found || draws > gamma) break;
      }
      auto gap = [&snap](int b) { return snap[(size_t)b]; };
      int dest = min_by(cands, tie, gap);
      rec.outcome.retries_used = draws;
      rec.outcome.found_nonpositive = found;
      rec.outcome.destination = dest;
      c1[dest].push_back(ball);
      pending[ball] = std::move(rec);
    }

    std::vector<long> placed;
    std::vector<long> next_unplaced;
    for (auto& [bin, list] : c1) {
      size_t pick = 0;
      if (list.size() > 1) {
        Stream accept(derive_seed(rseed, (uint64_t)bin, kPurposeAccept));
        pick = (size_t)accept.bounded(list.size());
      }
      for (size_t q = 0; q < list.size(); ++q) {
        if (q == pick) {
          bins.load[(size_t)bin] += 1.0;
          placed.push_back(list[q]);
        } else {
          next_unplaced.push_back(list[q]);
        }
      }
    }
    std::sort(placed.begin(), placed.end());
    std::sort(next_unplaced.begin(), next_unplaced.end());

    for (long ball : placed) {
      TraceRecord& rec = pending[ball];
      Stream samp(derive_seed(rseed, (uint64_t)ball, kPurposeSampling));
      const std::vector<int>& final_set = rec.outcome.candidates.back();
      double inc = 1.0 / cfg.d;
      for (int b : final_set) {
        double pre = bins.est[(size_t)b];
        double post = pre + inc;
        long alpha = (long)std::ceil(pre);
        bool allow = true;
        if (alpha >= 1 && pre <= (double)alpha && (double)alpha < post)
          allow = sampled_gate(bins, b, alpha, 1.0, samp, cfg);
        if (allow) bins.est[(size_t)b] = post;
      }
    }
    bins.balls_placed += (long)placed.size();

    uint64_t h = snapshot_hash(bins.as_bin_states());
    for (long ball : placed) {
      TraceRecord rec = std::move(pending[ball]);
      rec.state_hash = h;
      trace.push_back(std::move(rec));
    }
    if (round > cfg.m) break;  // cannot happen; guards a hang if it ever did
    unplaced = std::move(next_unplaced);
  }
  return trace;
}

}  // namespace

std::vector<TraceRecord> reference_allocate(const SimConfig& cfg, uint64_t seed) {
  cfg.validate();
  if (cfg.n > kMaxBins || cfg.m > kMaxBalls)
    throw ConfigError("reference_allocate: instance too large (n <= 64, m <= 1000)");
  if (cfg.algorithm != Algorithm::Idea)
    throw ConfigError("reference_allocate: only the estimated-average allocator is mirrored");
  if (cfg.variant.kind == VariantKind::Parallel) return parallel_reference(cfg, seed);
  return sequential_reference(cfg, seed);
}

std::vector<TraceRecord> reference_allocate(const SimConfig& cfg) {
  return reference_allocate(cfg, trial_seed(cfg.seed, 0, 0));
}

long first_divergence(const std::vector<TraceRecord>& a, const std::vector<TraceRecord>& b) {
  size_t k = std::min(a.size(), b.size());
  for (size_t i = 0; i < k; ++i) {
    const AllocationOutcome& x = a[i].outcome;
    const AllocationOutcome& y = b[i].outcome;
    if (x.ball_index != y.ball_index || x.destination != y.destination ||
        x.retries_used != y.retries_used || x.found_nonpositive != y.found_nonpositive ||
        a[i].state_hash != b[i].state_hash)
      return (long)i;
  }
  if (a.size() != b.size()) return (long)k;
  return -1;
}

}  // namespace allocbench::bench
