#pragma once

#include <string>
#include <vector>

#include "allocbench/bench/experiment.hpp"

namespace allocbench::bench {

// Fixed-order results CSV:
// cell_id,algorithm,n,m,d,mode,variant,trial,seed,max_load,min_load,gap,
// mean_retries,sum_est_gap,est_avg_max_error,nonpositive_gap_fraction,
// messages,rounds (rounds empty unless parallel)
void write_results_csv(const std::string& path, const std::vector<TrialRow>& rows);
std::string results_csv_string(const std::vector<TrialRow>& rows);

// Same rows as a JSON array.
void write_results_json(const std::string& path, const std::vector<TrialRow>& rows);

// Per-ball trace, one JSON object per line:
// {"ball":..,"retries":..,"candidates":[[..],..],"dest":..,
//  "found_nonpositive":..,"state_hash":"hex"}
void write_trace_jsonl(const std::string& path, const RunResult& run);
std::string trace_jsonl_string(const RunResult& run);

void write_checks_json(const std::string& path, const std::vector<CheckResult>& checks);

// ExperimentSpec <-> JSON (field names mirror the struct).
ExperimentSpec experiment_from_json_file(const std::string& path);
ExperimentSpec experiment_from_json_string(const std::string& text);
std::string experiment_to_json_string(const ExperimentSpec& spec);

// CLI syntax "uniform:w_star,k" | "twopoint:w_star,k,p" | "tnormal:w_star,k,sigma".
WeightModel parse_weight_dist(const std::string& text);

// CLI syntax "uniform" | "custom:<file>"; the file holds a JSON array of
// {"dims": [..], "w": weight} entries.
MdDistribution parse_md_dist(const std::string& text);
MdDistribution md_dist_from_json_string(const std::string& text);

}  // namespace allocbench::bench
