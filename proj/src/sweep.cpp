#include "arbsim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "arbsim/errors.hpp"

namespace arbsim {

GatePolicy load_policy_or_default(const std::string& path) {
  if (path.empty())
    throw ConfigError("the arbiter method needs a policy checkpoint (--policy)");
  return GatePolicy::load(path);
}

namespace {

struct HeatJob {
  std::string method;
  double p_out = 0.0;
  uint64_t seed = 0;
  int heat_index = 0;
};

std::unique_ptr<HighLevelController> make_controller(const std::string& method,
                                                     const ScenarioConfig& sc,
                                                     const GatePolicy* policy) {
  if (method == "arbiter") return make_arbiter_controller(sc, *policy);
  if (method == "mpc") return make_mpc_controller(sc);
  if (method == "pure_pursuit") return make_pure_pursuit_controller(sc);
  throw ConfigError("unknown method '" + method + "'");
}

}  // namespace

SweepResult run_sweep(const ScenarioConfig& base, const World& world, const SweepConfig& cfg,
                      const std::optional<std::string>& out_dir) {
  std::optional<GatePolicy> policy;
  for (const auto& m : cfg.methods)
    if (m == "arbiter" && !policy) policy = load_policy_or_default(cfg.policy_path);

  std::vector<HeatJob> jobs;
  for (const auto& method : cfg.methods)
    for (double p_out : cfg.p_outs)
      for (uint64_t seed : cfg.seeds)
        for (int h = 0; h < cfg.heats_per_seed; ++h) jobs.push_back({method, p_out, seed, h});

  SweepResult result;
  result.records.resize(jobs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const HeatJob& job = jobs[i];
      ScenarioConfig sc = base;
      sc.impairments.p_out = job.p_out;
      try {
        auto controller = make_controller(job.method, sc, policy ? &*policy : nullptr);
        result.records[i] = run_heat(sc, world, *controller, job.seed, job.heat_index);
      } catch (const std::exception& e) {
        // a crashed heat still produces a record
        HeatRecord rec;
        rec.method = job.method;
        rec.p_out = job.p_out;
        rec.seed = job.seed;
        rec.heat_index = job.heat_index;
        rec.crashed = true;
        rec.events.push_back({0, "error", e.what()});
        result.records[i] = rec;
      }
    }
  };

  const int n_workers = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(jobs.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  result.summaries = summarize_groups(result.records);

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    write_records_jsonl(result.records, *out_dir + "/records.jsonl");
    write_summary_csv(result.summaries, *out_dir + "/summary.csv");
    write_runtime_histograms(result.records, *out_dir);
  }
  return result;
}

void write_records_jsonl(const std::vector<HeatRecord>& records, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  for (const auto& r : records) f << r.to_jsonl() << "\n";
}

void write_summary_csv(const std::vector<MetricsSummary>& summaries, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << summary_csv_header() << "\n";
  for (const auto& s : summaries) f << summary_csv_row(s) << "\n";
}

void write_runtime_histograms(const std::vector<HeatRecord>& records, const std::string& dir) {
  std::map<std::pair<std::string, double>, std::vector<double>> groups;
  for (const auto& r : records) {
    auto& samples = groups[{r.method, r.p_out}];
    samples.insert(samples.end(), r.runtime_ms.begin(), r.runtime_ms.end());
  }
  for (auto& [key, samples] : groups) {
    if (samples.empty()) continue;
    const double max_v = *std::max_element(samples.begin(), samples.end());
    const int bins = 40;
    const double width = max_v > 0 ? max_v / bins : 1.0;
    std::vector<long> counts(bins, 0);
    for (double v : samples) {
      int b = static_cast<int>(v / width);
      if (b >= bins) b = bins - 1;
      if (b < 0) b = 0;
      ++counts[b];
    }
    std::ostringstream name;
    name << dir << "/runtime_hist_" << key.first << "_pout" << key.second << ".csv";
    std::ofstream f(name.str());
    f << "bin_lo_ms,bin_hi_ms,count\n";
    for (int b = 0; b < bins; ++b)
      f << b * width << "," << (b + 1) * width << "," << counts[b] << "\n";
  }
}

}  // namespace arbsim
