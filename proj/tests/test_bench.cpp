#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "allocbench/bench/checks.hpp"
#include "allocbench/bench/experiment.hpp"
#include "allocbench/bench/oracle.hpp"
#include "allocbench/bench/trace_io.hpp"
#include "allocbench/parallel.hpp"

using namespace allocbench;
using namespace allocbench::bench;

TEST_CASE("reference oracle refuses large instances and wrong algorithms") {
  SimConfig cfg;
  cfg.n = 128;
  cfg.m = 10;
  CHECK_THROWS_AS(reference_allocate(cfg), ConfigError);
  cfg.n = 8;
  cfg.m = 5000;
  CHECK_THROWS_AS(reference_allocate(cfg), ConfigError);
  cfg.m = 10;
  cfg.algorithm = Algorithm::GreedyD;
  CHECK_THROWS_AS(reference_allocate(cfg), ConfigError);
}

TEST_CASE("reference oracle trivial cases") {
  SimConfig cfg;
  cfg.n = 8;
  cfg.m = 0;
  CHECK(reference_allocate(cfg).empty());
  cfg.n = 1;
  cfg.m = 7;
  cfg.d = 1;
  auto trace = reference_allocate(cfg);
  REQUIRE(trace.size() == 7);
  for (const auto& rec : trace) CHECK(rec.outcome.destination == 0);
}

TEST_CASE("first_divergence pinpoints the earliest mismatch") {
  SimConfig cfg;
  cfg.n = 8;
  cfg.m = 50;
  cfg.seed = 99;
  auto a = reference_allocate(cfg);
  auto b = a;
  CHECK(first_divergence(a, b) == -1);
  b[17].state_hash ^= 1;
  CHECK(first_divergence(a, b) == 17);
  b = a;
  b.pop_back();
  CHECK(first_divergence(a, b) == 49);
}

TEST_CASE("oracle equivalence over random small configs") {
  // trimmed version of the acceptance sweep: a handful of random configs
  // across modes and variants
  Stream pick(123456);
  for (int i = 0; i < 12; ++i) {
    SimConfig cfg;
    cfg.n = 2 + (long)pick.bounded(31);
    cfg.d = 1 + (int)pick.bounded(3);
    if (cfg.d > cfg.n) cfg.d = (int)cfg.n;
    cfg.m = 1 + (long)pick.bounded(256);
    cfg.seed = pick.next();
    cfg.mode = pick.bounded(2) ? Mode::Sampled : Mode::Numbered;
    cfg.record_trace = true;
    switch (pick.bounded(4)) {
      case 1: {
        cfg.variant.kind = VariantKind::Weighted;
        cfg.variant.weight.w_star = 1.0;
        cfg.variant.weight.k = 0.5;
        break;
      }
      case 2: {
        cfg.variant.kind = VariantKind::MultiDim;
        cfg.variant.dims = 1 + (int)pick.bounded(8);
        cfg.variant.populated = 1 + (int)pick.bounded((uint64_t)cfg.variant.dims);
        break;
      }
      case 3: {
        cfg.variant.kind = VariantKind::Parallel;
        cfg.mode = Mode::Sampled;
        break;
      }
      default:
        break;
    }
    RunResult res = cfg.variant.kind == VariantKind::Parallel ? run_parallel(cfg)
                                                              : run_sequential(cfg);
    auto ref = reference_allocate(cfg);
    std::vector<TraceRecord> main_trace;
    for (size_t q = 0; q < res.trace.size(); ++q)
      main_trace.push_back({res.trace[q], res.trace_hashes[q]});
    long div = first_divergence(ref, main_trace);
    CAPTURE(cfg.n);
    CAPTURE(cfg.m);
    CAPTURE(cfg.d);
    CAPTURE((int)cfg.variant.kind);
    CHECK(div == -1);
  }
}

TEST_CASE("gap-theorem check on synthetic data") {
  // perfectly balanced: every ratio shows gap 0
  std::map<long, ReportAggregate> balanced;
  for (long ratio : {1L, 10L, 100L}) {
    GapReport r;
    r.gap = 0.0;
    balanced[ratio].add(r);
  }
  CHECK(check_gap_theorem(balanced).pass);

  // gap growing with log(m/n): means diverge -> fail
  std::map<long, ReportAggregate> growing;
  double g = 1.0;
  for (long ratio : {1L, 10L, 100L}) {
    GapReport r;
    r.gap = g;
    g += 2.0;
    growing[ratio].add(r);
  }
  CHECK_FALSE(check_gap_theorem(growing).pass);
}

TEST_CASE("retry expectation closed form") {
  CHECK(expected_retries(2) == doctest::Approx(4.0 / 3.0));
  CHECK(expected_retries(6) == doctest::Approx(1.0 + 1.0 / 63.0));
  CHECK(check_retry_expectation(4.0 / 3.0, 2).pass);
  CHECK(check_retry_expectation(1.20, 2).pass);
  CHECK_FALSE(check_retry_expectation(1.05, 2).pass);
  CHECK_FALSE(check_retry_expectation(2.5, 2).pass);
  CHECK(check_retry_expectation(8.0 / 7.0, 3).pass);
}

TEST_CASE("retry distribution chi-square accepts its own law and rejects others") {
  // synthesize a histogram following p_i = (2^d-1)/2^(id) at d=2
  std::map<int, long> good;
  long total = 1000000;
  double rest = 1.0;
  for (int i = 1; i <= 8; ++i) {
    double p = 3.0 / std::pow(4.0, i);
    good[i] = (long)(total * p);
    rest -= p;
  }
  good[9] = (long)(total * rest);
  CHECK(check_retry_distribution(good, 2).pass);

  std::map<int, long> bad{{1, 500000L}, {2, 500000L}};
  CHECK_FALSE(check_retry_distribution(bad, 2).pass);
}

TEST_CASE("choice statistics check") {
  // d = n: every ball selects every bin, count = m exactly
  std::vector<std::vector<long>> counts(3, std::vector<long>(4, 100));
  CHECK(check_choice_statistics(counts, 4, 100, 4).pass);
  // one bin over the log2 bound
  counts[1][2] = 100 * 3;  // (md/n)*log2(n) = 100*... for n=4,d=4,m=100: 200*...
  CHECK_FALSE(check_choice_statistics(counts, 4, 100, 4).pass);
}

TEST_CASE("sampling cost check") {
  CHECK(check_sampling_cost({100, 7999}, 1000, 2).pass);
  CHECK_FALSE(check_sampling_cost({100, 8001}, 1000, 2).pass);
}

TEST_CASE("grid expansion and empty grid") {
  ExperimentSpec empty;
  CHECK(expand_grid(empty).empty());
  ExperimentResult nothing = run_experiment(empty, RunOptions{});
  CHECK(nothing.rows.empty());
  CHECK(nothing.ok);

  ExperimentSpec spec;
  spec.base.n = 10;
  spec.base.m = 20;
  spec.base.d = 2;
  CHECK(expand_grid(spec).size() == 1);
  spec.sweep.n = {10, 20};
  spec.sweep.m_over_n = {1, 5};
  spec.sweep.d = {1, 2};
  auto cells = expand_grid(spec);
  CHECK(cells.size() == 8);
  for (const auto& c : cells) {
    bool ratio_ok = c.cfg.m == c.cfg.n * 1 || c.cfg.m == c.cfg.n * 5;
    CHECK(ratio_ok);
  }
}

TEST_CASE("experiment runner is deterministic and writes the pinned CSV") {
  ExperimentSpec spec;
  spec.base.n = 16;
  spec.base.m = 64;
  spec.base.seed = 4242;
  spec.trials_per_cell = 3;
  spec.checks = {"choice-stats"};
  RunOptions opts;  // no files
  ExperimentResult a = run_experiment(spec, opts);
  ExperimentResult b = run_experiment(spec, opts);
  REQUIRE(a.rows.size() == 3);
  CHECK(results_csv_string(a.rows) == results_csv_string(b.rows));
  REQUIRE(a.checks.size() == 1);
  CHECK(a.checks[0].pass);

  std::string csv = results_csv_string(a.rows);
  CHECK(csv.rfind("cell_id,algorithm,n,m,d,mode,variant,trial,seed,max_load,min_load,gap,"
                  "mean_retries,sum_est_gap,est_avg_max_error,nonpositive_gap_fraction,"
                  "messages,rounds\n",
                  0) == 0);
  // one header + 3 rows
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("trace jsonl carries the contract fields") {
  SimConfig cfg;
  cfg.n = 6;
  cfg.m = 10;
  cfg.record_trace = true;
  RunResult res = run_sequential(cfg);
  std::string text = trace_jsonl_string(res);
  std::istringstream lines(text);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    CHECK(line.find("\"ball\":") != std::string::npos);
    CHECK(line.find("\"retries\":") != std::string::npos);
    CHECK(line.find("\"candidates\":") != std::string::npos);
    CHECK(line.find("\"dest\":") != std::string::npos);
    CHECK(line.find("\"found_nonpositive\":") != std::string::npos);
    CHECK(line.find("\"state_hash\":") != std::string::npos);
    ++count;
  }
  CHECK(count == 10);
}

TEST_CASE("experiment config JSON round-trips") {
  ExperimentSpec spec;
  spec.base.n = 100;
  spec.base.m = 1000;
  spec.base.mode = Mode::Sampled;
  spec.base.algorithm = Algorithm::Idea;
  spec.base.variant.kind = VariantKind::Weighted;
  spec.base.variant.weight = parse_weight_dist("uniform:1,0.5");
  spec.trials_per_cell = 7;
  spec.checks = {"gap-theorem", "retry-expectation"};
  spec.sweep.m_over_n = {1, 10};
  std::string text = experiment_to_json_string(spec);
  ExperimentSpec back = experiment_from_json_string(text);
  CHECK(back.base.n == 100);
  CHECK(back.base.mode == Mode::Sampled);
  CHECK(back.base.variant.kind == VariantKind::Weighted);
  CHECK(back.base.variant.weight.k == 0.5);
  CHECK(back.trials_per_cell == 7);
  CHECK(back.checks.size() == 2);
  CHECK(back.sweep.m_over_n == std::vector<long>{1, 10});
}

TEST_CASE("weight-dist CLI syntax") {
  WeightModel u = parse_weight_dist("uniform:2,0.5");
  CHECK(u.shape == WeightShape::Uniform);
  CHECK(u.w_star == 2.0);
  CHECK(u.k == 0.5);
  WeightModel t = parse_weight_dist("twopoint:1,0.5,0.25");
  CHECK(t.shape == WeightShape::TwoPoint);
  CHECK(t.p == 0.25);
  WeightModel n = parse_weight_dist("tnormal:1,0.5,0.3");
  CHECK(n.shape == WeightShape::TruncatedNormal);
  CHECK(n.sigma == 0.3);
  CHECK_THROWS_AS(parse_weight_dist("zipf:1,2"), ConfigError);
  CHECK_THROWS_AS(parse_weight_dist("uniform:1"), ConfigError);
}

TEST_CASE("run_experiment writes files and reports check failures in exit flag") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "allocbench_test_out";
  fs::remove_all(dir);
  fs::create_directories(dir);

  ExperimentSpec spec;
  spec.base.n = 12;
  spec.base.m = 24;
  spec.base.record_trace = true;
  spec.trials_per_cell = 2;
  RunOptions opts;
  opts.out_dir = dir.string();
  opts.trace = true;
  ExperimentResult res = run_experiment(spec, opts);
  CHECK(res.ok);
  CHECK(fs::exists(dir / "results.csv"));
  CHECK(fs::exists(dir / "trace-cell0-trial0.jsonl"));
  CHECK(fs::exists(dir / "trace-cell0-trial1.jsonl"));
  fs::remove_all(dir);
}
