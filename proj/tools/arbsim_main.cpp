// arbsim command-line tool: train / eval / sweep / plot / verify workflows
// over scenario config files, with a reproducibility manifest per run.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "arbsim/errors.hpp"
#include "arbsim/heat.hpp"
#include "arbsim/manifest.hpp"
#include "arbsim/metrics.hpp"
#include "arbsim/scenario.hpp"
#include "arbsim/svg.hpp"
#include "arbsim/sweep.hpp"
#include "arbsim/trainer.hpp"
#include "arbsim/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;

struct GlobalArgs {
  bool desk = false;
  uint64_t seed_override = 0;
  bool has_seed_override = false;
  int jobs = 1;
};

std::vector<arbsim::MetricsSummary> read_summary_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw arbsim::ConfigError("cannot open " + path);
  std::vector<arbsim::MetricsSummary> out;
  std::string line;
  std::getline(f, line);  // header
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    arbsim::MetricsSummary s;
    std::getline(ss, s.method, ',');
    auto num = [&]() {
      std::getline(ss, tok, ',');
      return std::stod(tok);
    };
    s.p_out = num();
    s.n_heats = static_cast<int>(num());
    s.sr = num();
    s.coll = num();
    s.offtrk = num();
    s.timeout = num();
    s.unsafe = num();
    s.sr_safe = num();
    s.runtime_mean_ms = num();
    s.runtime_worst_ms = num();
    s.n_crashed = static_cast<int>(num());
    out.push_back(s);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D driving simulator and control stack: global-local command fusion, "
               "sampling-based baseline, LiDAR impairments, robustness evaluation"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_flag("--desk", g.desk, "reduced desk-scale grids and step counts");
  app.add_option("--seed", g.seed_override, "override config seeds")
      ->each([&g](const std::string&) { g.has_seed_override = true; });
  app.add_option("--jobs", g.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);

  // train
  auto* train_cmd = app.add_subcommand("train", "PPO-train the gate policy");
  std::string train_scenario, train_out = "runs/train";
  long train_steps = 0;
  uint64_t train_seed = 1;
  train_cmd->add_option("--scenario", train_scenario, "scenario config file")->required();
  train_cmd->add_option("--steps", train_steps, "total environment steps (0 = config scale)");
  train_cmd->add_option("--out", train_out, "output directory");
  train_cmd->add_option("--seed", train_seed, "training seed");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "run heats for one method");
  std::string eval_scenario, eval_method = "arbiter", eval_policy, eval_out = "runs/eval";
  std::string eval_seeds;
  int eval_heats = 0;
  eval_cmd->add_option("--scenario", eval_scenario, "scenario config file")->required();
  eval_cmd->add_option("--method", eval_method, "arbiter | mpc | pure_pursuit")
      ->check(CLI::IsMember({"arbiter", "mpc", "pure_pursuit"}));
  eval_cmd->add_option("--policy", eval_policy, "gate policy checkpoint");
  eval_cmd->add_option("--seeds", eval_seeds, "comma-separated seed list");
  eval_cmd->add_option("--heats", eval_heats, "heats per seed (0 = config value)");
  eval_cmd->add_option("--out", eval_out, "output directory");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "impairment grid over both methods");
  std::string sweep_scenario, sweep_policy, sweep_out = "runs/sweep", sweep_grid;
  std::string sweep_methods = "arbiter,mpc", sweep_pouts, sweep_seeds;
  int sweep_heats = 0;
  sweep_cmd->add_option("--scenario", sweep_scenario, "base scenario config")->required();
  sweep_cmd->add_option("--grid", sweep_grid, "overlay config applied over the base");
  sweep_cmd->add_option("--policy", sweep_policy, "gate policy checkpoint");
  sweep_cmd->add_option("--methods", sweep_methods, "comma-separated method list");
  sweep_cmd->add_option("--p-outs", sweep_pouts, "comma-separated outlier probabilities");
  sweep_cmd->add_option("--seeds", sweep_seeds, "comma-separated seed list");
  sweep_cmd->add_option("--heats", sweep_heats, "heats per seed (0 = config value)");
  sweep_cmd->add_option("--out", sweep_out, "output directory");

  // plot
  auto* plot_cmd = app.add_subcommand("plot", "robustness curves from a sweep directory");
  std::string plot_in, plot_out;
  plot_cmd->add_option("--in", plot_in, "directory containing summary.csv")->required();
  plot_cmd->add_option("--out", plot_out, "output directory (default: --in)");

  // verify
  app.add_subcommand("verify", "run the module-level oracle suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  auto split_u64 = [](const std::string& s) {
    std::vector<uint64_t> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) out.push_back(std::stoull(tok));
    return out;
  };
  auto split_str = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) out.push_back(tok);
    return out;
  };
  auto split_f64 = [](const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
  };

  try {
    if (app.got_subcommand("verify")) {
      return arbsim::run_verify_suites(std::cout) ? kExitOk : kExitRuntime;
    }

    if (app.got_subcommand(train_cmd)) {
      arbsim::RunManifest manifest = arbsim::start_manifest(argc, argv);
      manifest.add_config(train_scenario);
      const arbsim::ScenarioConfig sc = arbsim::load_scenario(train_scenario);
      const arbsim::World world = arbsim::load_world(sc);
      arbsim::PpoHyperparams hp;
      if (train_steps > 0) hp.total_steps = train_steps;
      else if (g.desk) hp.total_steps = 50000;
      arbsim::TrainOptions opts;
      opts.total_steps = hp.total_steps;
      opts.seed = g.has_seed_override ? g.seed_override : train_seed;
      opts.out_dir = train_out;
      opts.progress_every = 1;
      manifest.seeds = {opts.seed};
      std::filesystem::create_directories(train_out);
      manifest.write(train_out + "/manifest.json");
      const arbsim::TrainResult result = arbsim::train(sc, world, hp, opts);
      std::cout << "training complete: " << result.evals.size() << " evaluations, best "
                << result.best_checkpoint << ", final " << result.final_checkpoint << "\n";
      if (!result.evals.empty())
        std::cout << "final eval: reward " << result.evals.back().mean_reward << ", success "
                  << result.evals.back().success_rate << "\n";
      manifest.finalize(train_out + "/manifest.json", "ok");
      return kExitOk;
    }

    if (app.got_subcommand(eval_cmd)) {
      arbsim::RunManifest manifest = arbsim::start_manifest(argc, argv);
      manifest.add_config(eval_scenario);
      const arbsim::ScenarioConfig sc = arbsim::load_scenario(eval_scenario);
      const arbsim::World world = arbsim::load_world(sc);
      arbsim::SweepConfig cfg;
      cfg.methods = {eval_method};
      cfg.p_outs = {sc.impairments.p_out};
      cfg.seeds = eval_seeds.empty() ? sc.seeds : split_u64(eval_seeds);
      if (g.has_seed_override) cfg.seeds = {g.seed_override};
      cfg.heats_per_seed = eval_heats > 0 ? eval_heats : sc.heats;
      if (g.desk) cfg.heats_per_seed = std::min(cfg.heats_per_seed, 4);
      cfg.jobs = g.jobs;
      cfg.policy_path = eval_policy;
      manifest.seeds = cfg.seeds;
      std::filesystem::create_directories(eval_out);
      manifest.write(eval_out + "/manifest.json");
      const arbsim::SweepResult result = arbsim::run_sweep(sc, world, cfg, eval_out);
      for (const auto& s : result.summaries)
        std::cout << arbsim::summary_csv_header() << "\n"
                  << arbsim::summary_csv_row(s) << "\n";
      manifest.finalize(eval_out + "/manifest.json", "ok");
      return kExitOk;
    }

    if (app.got_subcommand(sweep_cmd)) {
      arbsim::RunManifest manifest = arbsim::start_manifest(argc, argv);
      manifest.add_config(sweep_scenario);
      arbsim::ConfigSections sections = arbsim::read_config_file(sweep_scenario);
      if (!sweep_grid.empty()) {
        manifest.add_config(sweep_grid);
        for (const auto& [sec, kv] : arbsim::read_config_file(sweep_grid))
          for (const auto& [k, v] : kv) sections[sec][k] = v;
      }
      const arbsim::ScenarioConfig sc = arbsim::scenario_from_sections(sections);
      const arbsim::World world = arbsim::load_world(sc);
      arbsim::SweepConfig cfg;
      if (!sweep_methods.empty()) cfg.methods = split_str(sweep_methods);
      if (!sweep_pouts.empty()) cfg.p_outs = split_f64(sweep_pouts);
      cfg.seeds = sweep_seeds.empty() ? sc.seeds : split_u64(sweep_seeds);
      if (g.has_seed_override) cfg.seeds = {g.seed_override};
      cfg.heats_per_seed = sweep_heats > 0 ? sweep_heats : sc.heats;
      if (g.desk) {
        // reduced grid, schema unchanged
        if (cfg.seeds.size() > 2) cfg.seeds.resize(2);
        cfg.heats_per_seed = std::min(cfg.heats_per_seed, 4);
      }
      cfg.jobs = g.jobs;
      cfg.policy_path = sweep_policy;
      manifest.seeds = cfg.seeds;
      std::filesystem::create_directories(sweep_out);
      manifest.write(sweep_out + "/manifest.json");
      const arbsim::SweepResult result = arbsim::run_sweep(sc, world, cfg, sweep_out);
      std::cout << arbsim::summary_csv_header() << "\n";
      for (const auto& s : result.summaries) std::cout << arbsim::summary_csv_row(s) << "\n";
      arbsim::emit_curves(result.summaries, sweep_out);
      std::cout << "sweep written to " << sweep_out << "\n";
      manifest.finalize(sweep_out + "/manifest.json", "ok");
      return kExitOk;
    }

    if (app.got_subcommand(plot_cmd)) {
      const std::string out = plot_out.empty() ? plot_in : plot_out;
      const auto summaries = read_summary_csv(plot_in + "/summary.csv");
      const auto files = arbsim::emit_curves(summaries, out);
      for (const auto& f : files) std::cout << "wrote " << f << "\n";
      return kExitOk;
    }
  } catch (const arbsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const arbsim::InsufficientData& e) {
    std::cerr << "insufficient data: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
