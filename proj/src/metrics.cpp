#include "arbsim/metrics.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "arbsim/errors.hpp"
#include "arbsim/heat.hpp"

namespace arbsim {

bool unsafe_proximity(std::span<const double> trace, double c_unsafe, int persistence) {
  int run = 0;
  for (double c : trace) {
    run = c < c_unsafe ? run + 1 : 0;
    if (run >= persistence) return true;
  }
  return false;
}

MetricsSummary summarize(std::span<const HeatRecord> records, int warmup_exclude) {
  if (records.empty()) throw EmptyGroup("summarize needs at least one heat record");
  MetricsSummary s;
  s.method = records.front().method;
  s.p_out = records.front().p_out;
  s.warmup_excluded_steps = 0;

  int n = 0;
  int n_succ = 0, n_coll = 0, n_off = 0, n_to = 0, n_unsafe = 0, n_safe_succ = 0;
  double rt_sum = 0.0;
  long rt_count = 0;
  double rt_worst = 0.0;
  for (const auto& r : records) {
    if (r.method != s.method || r.p_out != s.p_out)
      throw EmptyGroup("summarize requires a single (method, p_out) group");
    if (r.crashed) {
      ++s.n_crashed;
      continue;
    }
    ++n;
    switch (r.outcome) {
      case HeatOutcome::success: ++n_succ; break;
      case HeatOutcome::collision: ++n_coll; break;
      case HeatOutcome::offtrack: ++n_off; break;
      case HeatOutcome::timeout: ++n_to; break;
    }
    if (r.unsafe_flag) ++n_unsafe;
    if (r.outcome == HeatOutcome::success && !r.unsafe_flag) ++n_safe_succ;
    for (std::size_t i = 0; i < r.runtime_ms.size(); ++i) {
      rt_sum += r.runtime_ms[i];
      ++rt_count;
      if (static_cast<int>(i) < warmup_exclude) {
        ++s.warmup_excluded_steps;
        continue;  // warm-up samples keep the mean but not the worst case
      }
      rt_worst = std::max(rt_worst, r.runtime_ms[i]);
    }
  }
  if (n == 0) throw EmptyGroup("summarize group contains only crashed heats");
  s.n_heats = n;
  const double dn = static_cast<double>(n);
  s.sr = n_succ / dn;
  s.coll = n_coll / dn;
  s.offtrk = n_off / dn;
  s.timeout = n_to / dn;
  s.unsafe = n_unsafe / dn;
  s.sr_safe = n_safe_succ / dn;
  s.runtime_mean_ms = rt_count > 0 ? rt_sum / rt_count : 0.0;
  s.runtime_worst_ms = rt_worst;
  return s;
}

std::vector<MetricsSummary> summarize_groups(std::span<const HeatRecord> records,
                                             int warmup_exclude) {
  std::map<std::pair<std::string, double>, std::vector<HeatRecord>> groups;
  for (const auto& r : records) groups[{r.method, r.p_out}].push_back(r);
  std::vector<MetricsSummary> out;
  for (const auto& [key, recs] : groups) out.push_back(summarize(recs, warmup_exclude));
  return out;
}

std::string summary_csv_header() {
  return "method,p_out,n_heats,sr,coll,offtrk,timeout,unsafe,sr_safe,"
         "runtime_mean_ms,runtime_worst_ms,n_crashed";
}

std::string summary_csv_row(const MetricsSummary& s) {
  std::ostringstream ss;
  ss.precision(10);
  ss << s.method << "," << s.p_out << "," << s.n_heats << "," << s.sr << "," << s.coll << ","
     << s.offtrk << "," << s.timeout << "," << s.unsafe << "," << s.sr_safe << ","
     << s.runtime_mean_ms << "," << s.runtime_worst_ms << "," << s.n_crashed;
  return ss.str();
}

}  // namespace arbsim
