// allocbench: seeded balls-into-bins experiments with CSV/JSONL output.
#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "allocbench/bench/experiment.hpp"
#include "allocbench/bench/trace_io.hpp"

using namespace allocbench;

int main(int argc, char** argv) {
  CLI::App app{"balanced-allocation benchmark harness"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "run an experiment grid");

  std::string config_path;
  run->add_option("--config", config_path, "experiment spec (JSON)");

  long n = 0, m = 0;
  int d = 0, gamma_max = -2, retry_cap = 0, trials = 0, sample_large = 0;
  unsigned long long seed = 0;
  double beta = -1.0, epsilon = -1.0;
  std::string algorithm, mode, weight_dist, out_dir = ".", format = "csv";
  int dims = 0, populated = 0;
  bool parallel = false, trace = false;

  run->add_option("--n", n, "number of bins");
  run->add_option("--m", m, "number of balls");
  run->add_option("--d", d, "choices per retry");
  run->add_option("--gamma-max", gamma_max, "retry cap (default ceil(log2 n))");
  run->add_option("--algorithm", algorithm, "idea|one|greedy|beta|greedy-retry");
  run->add_option("--mode", mode, "numbered|sampled");
  run->add_option("--beta", beta, "greedy probability for --algorithm beta");
  run->add_option("--retry-cap", retry_cap, "draw count for --algorithm greedy-retry");
  run->add_option("--weight-dist", weight_dist,
                  "uniform:w_star,k | twopoint:w_star,k,p | tnormal:w_star,k,sigma");
  run->add_option("--dims", dims, "multidim: total dimensions D");
  run->add_option("--populated", populated, "multidim: populated dimensions f");
  std::string md_dist;
  run->add_option("--md-dist", md_dist, "multidim law: uniform | custom:<file>");
  run->add_flag("--parallel", parallel, "round-based parallel placement");
  run->add_option("--seed", seed, "base seed");
  run->add_option("--trials", trials, "trials per cell");
  run->add_option("--epsilon", epsilon, "sampled-mode decision tolerance");
  run->add_option("--sample-size-large", sample_large, "sampled-mode constant-phase size");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  run->add_flag("--trace", trace, "write per-ball JSONL traces");

  CLI11_PARSE(app, argc, argv);

  try {
    bench::ExperimentSpec spec;
    if (!config_path.empty()) spec = bench::experiment_from_json_file(config_path);

    SimConfig& base = spec.base;
    if (run->count("--n")) base.n = n;
    if (run->count("--m")) base.m = m;
    if (run->count("--d")) base.d = d;
    if (run->count("--gamma-max")) base.gamma_max = gamma_max;
    if (run->count("--algorithm")) base.algorithm = algorithm_from_string(algorithm);
    if (run->count("--mode")) base.mode = mode_from_string(mode);
    if (run->count("--beta")) base.beta = beta;
    if (run->count("--retry-cap")) base.retry_cap = retry_cap;
    if (run->count("--seed")) base.seed = (uint64_t)seed;
    if (run->count("--trials")) spec.trials_per_cell = trials;
    if (run->count("--epsilon")) base.epsilon = epsilon;
    if (run->count("--sample-size-large")) base.sample_size_large = sample_large;
    if (run->count("--weight-dist")) {
      base.variant.kind = VariantKind::Weighted;
      base.variant.weight = bench::parse_weight_dist(weight_dist);
    }
    if (run->count("--dims") || run->count("--populated")) {
      base.variant.kind = VariantKind::MultiDim;
      if (run->count("--dims")) base.variant.dims = dims;
      if (run->count("--populated")) base.variant.populated = populated;
    }
    if (run->count("--md-dist")) {
      base.variant.kind = VariantKind::MultiDim;
      base.variant.md_dist = bench::parse_md_dist(md_dist);
    }
    if (parallel) {
      base.variant.kind = VariantKind::Parallel;
      base.mode = Mode::Sampled;
    }
    if (trace) base.record_trace = true;

    bench::RunOptions opts;
    opts.out_dir = out_dir;
    opts.format = format;
    opts.trace = trace;
    std::filesystem::create_directories(out_dir);

    bench::ExperimentResult result = bench::run_experiment(spec, opts);
    std::cout << result.rows.size() << " trial rows written to " << out_dir << "\n";
    for (const bench::CheckResult& c : result.checks) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": observed " << c.observed
                << " (band " << c.band << ")";
      if (!c.detail.empty()) std::cout << " -- " << c.detail;
      std::cout << "\n";
    }
    return result.ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
