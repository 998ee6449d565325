#include <doctest.h>

#include <cmath>

#include "allocbench/bench/oracle.hpp"
#include "allocbench/weighted.hpp"

using namespace allocbench;

namespace {

WeightModel uniform_model(double w, double k) {
  WeightModel m;
  m.w_star = w;
  m.k = k;
  m.shape = WeightShape::Uniform;
  return m;
}

}  // namespace

TEST_CASE("degenerate model always returns w_star") {
  WeightModel m = uniform_model(2.5, 0.0);
  Stream s(1);
  for (int i = 0; i < 50; ++i) CHECK(sample_weight(m, s) == 2.5);
}

TEST_CASE("uniform weights: bounds always, mean converges") {
  WeightModel m = uniform_model(2.0, 1.0);
  Stream s(42);
  double sum = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    double w = sample_weight(m, s);
    CHECK(w >= 1.0);
    CHECK(w <= 3.0);
    sum += w;
  }
  double mean = sum / draws;
  CHECK(mean > 1.99);
  CHECK(mean < 2.01);
}

TEST_CASE("two-point at p=1/2 hits exactly the two extremes") {
  WeightModel m;
  m.w_star = 2.0;
  m.k = 1.0;
  m.shape = WeightShape::TwoPoint;
  m.p = 0.5;
  Stream s(7);
  long hi = 0, lo = 0;
  for (int i = 0; i < 20000; ++i) {
    double w = sample_weight(m, s);
    if (w == 3.0)
      ++hi;
    else if (w == 1.0)
      ++lo;
    else
      FAIL("unexpected two-point value");
  }
  CHECK(std::fabs((double)hi / 20000 - 0.5) < 0.02);
  CHECK(hi + lo == 20000);
}

TEST_CASE("asymmetric two-point keeps the mean and the bound") {
  WeightModel m;
  m.w_star = 1.0;
  m.k = 0.5;
  m.shape = WeightShape::TwoPoint;
  m.p = 0.25;
  Stream s(13);
  double sum = 0;
  for (int i = 0; i < 200000; ++i) {
    double w = sample_weight(m, s);
    CHECK(w >= 0.5);
    CHECK(w <= 1.5);
    sum += w;
  }
  CHECK(std::fabs(sum / 200000 - 1.0) < 0.005);
}

TEST_CASE("truncated normal stays inside the bound with the right mean") {
  WeightModel m;
  m.w_star = 1.0;
  m.k = 0.5;
  m.shape = WeightShape::TruncatedNormal;
  m.sigma = 0.4;
  Stream s(21);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    double w = sample_weight(m, s);
    CHECK(w >= 0.5);
    CHECK(w <= 1.5);
    sum += w;
  }
  CHECK(std::fabs(sum / 100000 - 1.0) < 0.01);
}

TEST_CASE("invalid models are rejected") {
  WeightModel m = uniform_model(1.0, 1.0);  // k == w_star
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = uniform_model(-1.0, 0.1);
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = uniform_model(1.0, 0.5);
  m.shape = WeightShape::TwoPoint;
  m.p = 0.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
}

namespace {

SimConfig weighted_cfg(long n, long m, int d, uint64_t seed, double w, double k) {
  SimConfig cfg;
  cfg.n = n;
  cfg.m = m;
  cfg.d = d;
  cfg.seed = seed;
  cfg.variant.kind = VariantKind::Weighted;
  cfg.variant.weight = uniform_model(w, k);
  return cfg;
}

}  // namespace

TEST_CASE("k=0 weighted run follows the unweighted trace exactly") {
  // all quantities scale by w_star = 2.5 exactly, so every argmin decision
  // and every cap comparison coincides with the unweighted run
  SimConfig wcfg = weighted_cfg(20, 300, 2, 31, 2.5, 0.0);
  wcfg.record_trace = true;
  SimConfig ucfg = wcfg;
  ucfg.variant.kind = VariantKind::Unweighted;
  RunResult w = run_sequential(wcfg);
  RunResult u = run_sequential(ucfg);
  REQUIRE(w.trace.size() == u.trace.size());
  for (size_t i = 0; i < w.trace.size(); ++i) {
    CHECK(w.trace[i].destination == u.trace[i].destination);
    CHECK(w.trace[i].retries_used == u.trace[i].retries_used);
  }
  for (size_t b = 0; b < w.bins.size(); ++b) {
    CHECK(w.bins[b].load == 2.5 * u.bins[b].load);
    CHECK(w.bins[b].est_avg == 2.5 * u.bins[b].est_avg);
  }
}

TEST_CASE("per-ball weighted zero-sum when ungated") {
  SimConfig cfg = weighted_cfg(64, 640, 2, 47, 1.0, 0.5);
  RunResult res = run_sequential(cfg);
  // d = 2: increments are exact halves of the weight
  CHECK(res.diag.ungated_delta_maxabs == 0.0);
  SimConfig cfg3 = weighted_cfg(64, 640, 3, 47, 1.0, 0.5);
  RunResult res3 = run_sequential(cfg3);
  CHECK(res3.diag.ungated_delta_maxabs <= 1e-12);
}

TEST_CASE("weight conservation within floating tolerance") {
  SimConfig cfg = weighted_cfg(100, 10000, 2, 53, 1.0, 0.5);
  RunResult res = run_sequential(cfg);
  double total = 0;
  for (const BinState& b : res.bins) total += b.load;
  CHECK(std::fabs(total - res.diag.total_weight) <= 1e-9 * cfg.m);
}

TEST_CASE("scale equivariance: weights x7 leave the placement trace unchanged") {
  SimConfig a = weighted_cfg(50, 2000, 2, 61, 1.0, 0.5);
  a.record_trace = true;
  SimConfig b = weighted_cfg(50, 2000, 2, 61, 7.0, 3.5);
  b.record_trace = true;
  RunResult ra = run_sequential(a);
  RunResult rb = run_sequential(b);
  REQUIRE(ra.trace.size() == rb.trace.size());
  for (size_t i = 0; i < ra.trace.size(); ++i) {
    CHECK(ra.trace[i].destination == rb.trace[i].destination);
    CHECK(ra.trace[i].retries_used == rb.trace[i].retries_used);
  }
}

TEST_CASE("weighted gap does not grow with m (sampled mode)") {
  // paired seeds at m = 10n and m = 100n; mean gaps differ by less than
  // 2 (w_star + k)
  const int trials = 5;
  double mean10 = 0, mean100 = 0;
  for (int t = 0; t < trials; ++t) {
    SimConfig a = weighted_cfg(500, 5000, 2, 91, 1.0, 0.5);
    a.mode = Mode::Sampled;
    mean10 += run_sequential_with_seed(a, trial_seed(a.seed, 0, t)).report.gap / trials;
    SimConfig b = weighted_cfg(500, 50000, 2, 91, 1.0, 0.5);
    b.mode = Mode::Sampled;
    mean100 += run_sequential_with_seed(b, trial_seed(b.seed, 0, t)).report.gap / trials;
  }
  CHECK(std::fabs(mean100 - mean10) < 2.0 * 1.5);
}

TEST_CASE("weighted runs match the reference oracle in both modes") {
  for (Mode mode : {Mode::Numbered, Mode::Sampled}) {
    SimConfig cfg = weighted_cfg(16, 250, 2, 71, 1.0, 0.5);
    cfg.mode = mode;
    cfg.record_trace = true;
    RunResult res = run_sequential(cfg);
    auto ref = bench::reference_allocate(cfg);
    REQUIRE(ref.size() == res.trace.size());
    for (size_t i = 0; i < ref.size(); ++i) {
      CHECK(ref[i].outcome.destination == res.trace[i].destination);
      CHECK(ref[i].state_hash == res.trace_hashes[i]);
    }
  }
}

TEST_CASE("allocate_weighted_ball agrees with the run loop") {
  SimConfig cfg = weighted_cfg(12, 60, 2, 83, 1.0, 0.25);
  cfg.record_trace = true;
  RunResult res = run_sequential(cfg);
  SystemState state(cfg.n);
  RngContract rng{trial_seed(cfg.seed, 0, 0)};
  for (long j = 1; j <= cfg.m; ++j) {
    AllocationOutcome out =
        allocate_weighted_ball(state, j, rng, cfg, cfg.variant.weight);
    CHECK(out.destination == res.trace[(size_t)j - 1].destination);
  }
  for (size_t b = 0; b < state.bins.size(); ++b) {
    CHECK(state.bins[b].load == res.bins[b].load);
    CHECK(state.bins[b].est_avg == res.bins[b].est_avg);
  }
}
