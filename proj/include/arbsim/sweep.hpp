#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arbsim/heat.hpp"
#include "arbsim/metrics.hpp"

namespace arbsim {

struct SweepConfig {
  std::vector<std::string> methods{"arbiter", "mpc"};
  std::vector<double> p_outs{0.0, 0.2, 0.4};
  std::vector<uint64_t> seeds{1, 2, 3};
  int heats_per_seed = 10;
  int jobs = 1;
  std::string policy_path;  // required when methods include the arbiter
};

struct SweepResult {
  std::vector<HeatRecord> records;        // one per scheduled heat, in grid order
  std::vector<MetricsSummary> summaries;  // one per (method, p_out)
};

// methods x p_out x seeds x heats grid over one base scenario; both methods
// see identical impairment parameters per p_out. Heats may run on a small
// worker pool (each worker owns its heats end to end); a crashed heat is
// recorded with its error, never dropped. If out_dir is set, writes
// records.jsonl, summary.csv and per-group runtime histograms.
SweepResult run_sweep(const ScenarioConfig& base, const World& world, const SweepConfig& cfg,
                      const std::optional<std::string>& out_dir);

// loads the policy once; exposed for the eval command as well
GatePolicy load_policy_or_default(const std::string& path);

void write_records_jsonl(const std::vector<HeatRecord>& records, const std::string& path);
void write_summary_csv(const std::vector<MetricsSummary>& summaries, const std::string& path);
void write_runtime_histograms(const std::vector<HeatRecord>& records,
                              const std::string& dir);

}  // namespace arbsim
