#include <doctest.h>

#include <algorithm>
#include <random>

#include "allocbench/core.hpp"

using namespace allocbench;

TEST_CASE("estimated_gap is load minus estimate") {
  CHECK(estimated_gap({0.0, 0.0}) == 0.0);
  CHECK(estimated_gap({3.0, 2.5}) == 0.5);
  CHECK(estimated_gap({1.0, 0.5}) == 0.5);  // one-candidacy bin at d=2
}

TEST_CASE("estimated_gap is linear in the load") {
  Stream s(11);
  for (int i = 0; i < 100; ++i) {
    double load = s.real01() * 50;
    double est = s.real01() * 50;
    double delta = s.real01() * 10 - 5;
    CHECK(estimated_gap({load + delta, est}) ==
          doctest::Approx(estimated_gap({load, est}) + delta).epsilon(1e-12));
  }
}

TEST_CASE("gap_report on a perfectly balanced system") {
  std::vector<BinState> bins(8, BinState{5.0, 5.0});
  std::vector<AllocationOutcome> outs;
  for (int i = 0; i < 40; ++i) outs.push_back({i + 1, 1, {}, i % 8, true});
  GapReport r = gap_report(bins, outs, 40.0);
  CHECK(r.gap == 0.0);
  CHECK(r.sum_est_gap == 0.0);
  CHECK(r.nonpositive_gap_fraction == 1.0);
  CHECK(r.max_load == 5.0);
  CHECK(r.min_load == 5.0);
  CHECK(r.mean_retries == 1.0);
  long total = 0;
  for (auto& [k, v] : r.retry_histogram) total += v;
  CHECK(total == 40);
}

TEST_CASE("gap_report direct arithmetic") {
  std::vector<BinState> bins{{2.0, 0.0}, {0.0, 0.0}};
  GapReport r = gap_report(bins, {}, 2.0);
  CHECK(r.true_avg == 1.0);
  CHECK(r.gap == 1.0);
  CHECK(r.min_load == 0.0);
}

TEST_CASE("gap_report rejects empty bins") {
  CHECK_THROWS_AS(gap_report({}, {}, 0.0), ConfigError);
}

TEST_CASE("report aggregation is order independent") {
  Stream s(77);
  std::vector<GapReport> reports;
  for (int i = 0; i < 12; ++i) {
    std::vector<BinState> bins;
    double total = 0;
    for (int b = 0; b < 6; ++b) {
      double load = std::floor(s.real01() * 10);
      bins.push_back({load, s.real01() * 10});
      total += load;
    }
    std::map<int, long> hist{{1, 5L + i}, {2, 3L}};
    reports.push_back(gap_report_from_state(bins, total, hist, i));
  }
  ReportAggregate fwd;
  for (const auto& r : reports) fwd.add(r);
  std::vector<size_t> order(reports.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937 rng(4);
  for (int rep = 0; rep < 10; ++rep) {
    std::shuffle(order.begin(), order.end(), rng);
    // split into two partial aggregates, merge in reverse
    ReportAggregate a, b;
    for (size_t i = 0; i < order.size(); ++i)
      (i % 2 ? a : b).add(reports[order[i]]);
    ReportAggregate merged = a;
    merged.merge(b);
    CHECK(merged.trials == fwd.trials);
    CHECK(merged.gap_sum_q == fwd.gap_sum_q);
    CHECK(merged.mean_retries_sum_q == fwd.mean_retries_sum_q);
    CHECK(merged.sum_est_gap_sum_q == fwd.sum_est_gap_sum_q);
    CHECK(merged.max_load == fwd.max_load);
    CHECK(merged.min_load == fwd.min_load);
    CHECK(merged.gap_max == fwd.gap_max);
  }
}

TEST_CASE("snapshot hash distinguishes states and is stable") {
  std::vector<BinState> a{{1.0, 0.5}, {2.0, 1.0}};
  std::vector<BinState> b{{1.0, 0.5}, {2.0, 1.0}};
  CHECK(snapshot_hash(a) == snapshot_hash(b));
  b[1].load += 1.0;
  CHECK(snapshot_hash(a) != snapshot_hash(b));
  // order matters: the hash rolls over bins in index order
  std::vector<BinState> c{{2.0, 1.0}, {1.0, 0.5}};
  CHECK(snapshot_hash(a) != snapshot_hash(c));
}

TEST_CASE("config validation") {
  SimConfig cfg;
  cfg.n = 10;
  cfg.m = 100;
  cfg.d = 2;
  CHECK_NOTHROW(cfg.validate());
  cfg.d = 11;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.d = 2;
  cfg.algorithm = Algorithm::OnePlusBeta;
  cfg.beta = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.beta = 0.5;
  CHECK_NOTHROW(cfg.validate());
  cfg.algorithm = Algorithm::Idea;
  cfg.variant.kind = VariantKind::MultiDim;
  cfg.variant.dims = 4;
  cfg.variant.populated = 5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.variant.populated = 4;
  CHECK_NOTHROW(cfg.validate());
  cfg.variant.kind = VariantKind::Weighted;
  cfg.variant.weight.w_star = 1.0;
  cfg.variant.weight.k = 1.0;  // weights could reach 0
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("gamma_max defaults to ceil(log2 n)") {
  SimConfig cfg;
  cfg.n = 1000;
  CHECK(cfg.effective_gamma_max() == 10);
  cfg.n = 1024;
  CHECK(cfg.effective_gamma_max() == 10);
  cfg.n = 1025;
  CHECK(cfg.effective_gamma_max() == 11);
  cfg.gamma_max = 3;
  CHECK(cfg.effective_gamma_max() == 3);
}
