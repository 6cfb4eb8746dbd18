#pragma once

#include <span>
#include <string>
#include <vector>

namespace arbsim {

struct HeatRecord;

// true iff some window of M consecutive control steps all sit below c_unsafe
bool unsafe_proximity(std::span<const double> clearance_trace, double c_unsafe = 0.35,
                      int persistence = 3);

struct MetricsSummary {
  std::string method;
  double p_out = 0.0;
  int n_heats = 0;
  int n_crashed = 0;
  double sr = 0.0;       // success rate
  double coll = 0.0;     // collision rate
  double offtrk = 0.0;   // off-track rate
  double timeout = 0.0;  // timeout rate
  double unsafe = 0.0;   // persistent unsafe-proximity rate
  double sr_safe = 0.0;  // successes that were never persistently unsafe
  double runtime_mean_ms = 0.0;   // all samples
  double runtime_worst_ms = 0.0;  // max, first warmup_exclude steps per heat excluded
  int warmup_excluded_steps = 0;  // logged exclusion count
};

// Rates over one (method, p_out) group. The first `warmup_exclude` runtime
// samples of each heat are excluded from the worst-case statistic only.
// Throws EmptyGroup on an empty record set.
MetricsSummary summarize(std::span<const HeatRecord> records, int warmup_exclude = 10);

// group records by (method, p_out) and summarize each group
std::vector<MetricsSummary> summarize_groups(std::span<const HeatRecord> records,
                                             int warmup_exclude = 10);

std::string summary_csv_header();
std::string summary_csv_row(const MetricsSummary& s);

}  // namespace arbsim
