#include "allocbench/bench/experiment.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <set>
#include <thread>

#include "allocbench/bench/trace_io.hpp"
#include "allocbench/parallel.hpp"

namespace allocbench::bench {

std::vector<CellSpec> expand_grid(const ExperimentSpec& spec) {
  std::vector<CellSpec> cells;
  const SweepSpec& sw = spec.sweep;
  if (spec.base.n == 0 && sw.empty()) return cells;  // nothing configured
  std::vector<long> ns = sw.n.empty() ? std::vector<long>{spec.base.n} : sw.n;
  std::vector<long> ratios = sw.m_over_n;
  std::vector<int> ds = sw.d.empty() ? std::vector<int>{spec.base.d} : sw.d;
  std::vector<Algorithm> algos =
      sw.algorithms.empty() ? std::vector<Algorithm>{spec.base.algorithm} : sw.algorithms;

  long index = 0;
  for (Algorithm a : algos) {
    for (long n : ns) {
      for (int d : ds) {
        std::vector<long> ms;
        if (ratios.empty()) {
          ms.push_back(spec.base.m);
        } else {
          for (long r : ratios) ms.push_back(n * r);
        }
        for (long m : ms) {
          CellSpec cell;
          cell.cell_index = index++;
          cell.cfg = spec.base;
          cell.cfg.algorithm = a;
          cell.cfg.n = n;
          cell.cfg.d = d;
          cell.cfg.m = m;
          cell.cfg.trials = spec.trials_per_cell;
          cell.cfg.validate();
          cells.push_back(std::move(cell));
        }
      }
    }
  }
  return cells;
}

RunResult run_one(const SimConfig& cfg, long cell_index, int trial_index) {
  const uint64_t seed = trial_seed(cfg.seed, cell_index, trial_index);
  if (cfg.variant.kind == VariantKind::Parallel) return run_parallel_with_seed(cfg, seed);
  return run_sequential_with_seed(cfg, seed);
}

namespace {

// Runs all trials of a cell, a batch at a time, each trial on its own
// derived stream. Results come back in trial order regardless of timing.
std::vector<RunResult> run_cell(const SimConfig& cfg, long cell_index, int trials,
                                unsigned threads) {
  std::vector<RunResult> out((size_t)trials);
  if (threads <= 1) {
    for (int t = 0; t < trials; ++t) out[(size_t)t] = run_one(cfg, cell_index, t);
    return out;
  }
  int next = 0;
  while (next < trials) {
    int batch = std::min<int>((int)threads, trials - next);
    std::vector<std::future<RunResult>> futs;
    for (int t = next; t < next + batch; ++t)
      futs.push_back(std::async(std::launch::async, run_one, cfg, cell_index, t));
    for (int q = 0; q < batch; ++q) out[(size_t)(next + q)] = futs[(size_t)q].get();
    next += batch;
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& opts) {
  std::vector<CellSpec> cells = expand_grid(spec);
  unsigned threads = opts.threads ? opts.threads : std::thread::hardware_concurrency();
  std::set<std::string> enabled(spec.checks.begin(), spec.checks.end());
  static const std::set<std::string> known{"choice-stats", "retry-expectation",
                                           "retry-distribution", "sampling-cost",
                                           "gap-theorem"};
  for (const std::string& name : enabled) {
    if (!known.count(name)) throw ConfigError("unknown check: " + name);
  }

  ExperimentResult result;
  // grouped data the cross-cell checks need
  std::map<std::tuple<std::string, long, int>, std::map<long, ReportAggregate>> gap_groups;

  for (const CellSpec& cell : cells) {
    SimConfig cfg = cell.cfg;
    cfg.record_trace = cfg.record_trace || opts.trace;
    std::vector<RunResult> runs = run_cell(cfg, cell.cell_index, spec.trials_per_cell, threads);

    ReportAggregate agg;
    std::vector<std::vector<long>> counts;
    std::vector<long> messages;
    for (int t = 0; t < (int)runs.size(); ++t) {
      RunResult& run = runs[(size_t)t];
      TrialRow row;
      row.cell_index = cell.cell_index;
      row.cfg = cell.cfg;
      row.trial = t;
      row.seed = trial_seed(cfg.seed, cell.cell_index, t);
      row.report = run.report;
      row.diag = run.diag;
      result.rows.push_back(row);
      agg.add(run.report);
      messages.push_back(run.report.messages);
      if (!run.candidacy_counts.empty()) counts.push_back(std::move(run.candidacy_counts));
      if (cfg.record_trace && !opts.out_dir.empty()) {
        write_trace_jsonl(opts.out_dir + "/trace-cell" + std::to_string(cell.cell_index) +
                              "-trial" + std::to_string(t) + ".jsonl",
                          run);
      }
    }

    if (enabled.count("choice-stats") && !counts.empty())
      result.checks.push_back(check_choice_statistics(counts, cfg.n, cfg.m, cfg.d));
    if (enabled.count("retry-expectation") && cfg.algorithm == Algorithm::Idea)
      result.checks.push_back(check_retry_expectation(agg.mean_retries_mean(), cfg.d));
    if (enabled.count("retry-distribution") && cfg.algorithm == Algorithm::Idea) {
      std::map<int, long> merged;
      for (const TrialRow& row : result.rows) {
        if (row.cell_index != cell.cell_index) continue;
        for (const auto& [retries, count] : row.report.retry_histogram)
          merged[retries] += count;
      }
      result.checks.push_back(check_retry_distribution(merged, cfg.d));
    }
    if (enabled.count("sampling-cost") && cfg.mode == Mode::Sampled &&
        cfg.variant.kind != VariantKind::Parallel)
      result.checks.push_back(check_sampling_cost(messages, cfg.n, cfg.d));
    if (enabled.count("gap-theorem") && cfg.algorithm == Algorithm::Idea && cfg.n > 0 &&
        cfg.m % cfg.n == 0) {
      std::string key = to_string(cfg.algorithm) + std::string("/") + to_string(cfg.mode);
      gap_groups[{key, cfg.n, cfg.d}][cfg.m / cfg.n].merge(agg);
    }
  }

  if (enabled.count("gap-theorem")) {
    for (const auto& [key, by_ratio] : gap_groups) {
      if (by_ratio.size() >= 2) result.checks.push_back(check_gap_theorem(by_ratio));
    }
  }

  for (const CheckResult& c : result.checks) result.ok = result.ok && c.pass;

  if (!opts.out_dir.empty()) {
    if (opts.format == "json")
      write_results_json(opts.out_dir + "/results.json", result.rows);
    else
      write_results_csv(opts.out_dir + "/results.csv", result.rows);
    if (!result.checks.empty())
      write_checks_json(opts.out_dir + "/checks.json", result.checks);
  }
  return result;
}

}  // namespace allocbench::bench
