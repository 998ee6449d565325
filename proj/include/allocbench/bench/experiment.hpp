#pragma once

#include <optional>
#include <string>
#include <vector>

#include "allocbench/bench/checks.hpp"
#include "allocbench/idea.hpp"
#include "allocbench/types.hpp"

namespace allocbench::bench {

// Optional parameter grid layered over the base config. Empty axes keep the
// base value.
struct SweepSpec {
  std::vector<long> n;
  std::vector<long> m_over_n;
  std::vector<int> d;
  std::vector<Algorithm> algorithms;

  bool empty() const {
    return n.empty() && m_over_n.empty() && d.empty() && algorithms.empty();
  }
};

struct ExperimentSpec {
  SimConfig base;
  SweepSpec sweep;
  int trials_per_cell = 1;
  std::vector<std::string> checks;  // named invariant checks to run
};

struct CellSpec {
  long cell_index = 0;
  SimConfig cfg;
};

// One results row per (cell, trial); mirrors the CSV contract.
struct TrialRow {
  long cell_index = 0;
  SimConfig cfg;
  int trial = 0;
  uint64_t seed = 0;  // derived trial seed
  GapReport report;
  RunDiagnostics diag;
};

struct ExperimentResult {
  std::vector<TrialRow> rows;
  std::vector<CheckResult> checks;
  bool ok = true;  // false iff any enabled check failed
};

std::vector<CellSpec> expand_grid(const ExperimentSpec& spec);

// Dispatches one trial to the right runner with its derived seed.
RunResult run_one(const SimConfig& cfg, long cell_index, int trial_index);

struct RunOptions {
  std::string out_dir;  // empty: no files written
  std::string format = "csv";
  bool trace = false;
  unsigned threads = 0;  // 0: hardware concurrency
};

// Executes grid x trials (trials concurrently, each on its own derived
// stream), writes result/trace files, evaluates the enabled checks.
ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& opts);

}  // namespace allocbench::bench
