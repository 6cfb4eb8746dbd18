#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "arbsim/gate_policy.hpp"
#include "arbsim/impairments.hpp"
#include "arbsim/ppo.hpp"
#include "arbsim/scenario.hpp"

namespace arbsim {

// Training-side episode loop. The policy's raw gate alpha is the action every
// control step; deployment-only machinery (gate low-pass, interaction gating,
// safety override) stays out of the loop, and the scan reaches the
// controllers clean because impairments are an evaluation protocol.
class TrainEnv {
 public:
  TrainEnv(const ScenarioConfig& scenario, const World& world);

  struct StepResult {
    Observation obs;       // raw (unmasked) next observation
    double reward = 0.0;   // base reward, shaping applied by the caller
    double d_front = 0.0;  // for the reference-gate shaping term
    bool done = false;
    bool collided = false;
    bool off_track = false;
    bool pass_event = false;
  };

  Observation reset(uint64_t episode_seed);
  StepResult step(double alpha);

  bool episode_succeeded() const { return pass_completed_; }
  double episode_progress() const;
  int steps_in_episode() const { return step_count_; }
  const ScenarioConfig& scenario() const { return sc_; }

 private:
  Observation observe() const;

  ScenarioConfig sc_;
  const World* world_;
  VehicleState ego_;
  VehicleState opp_;
  LidarScan scan_;
  RacelineTracker ego_tracker_;
  RacelineTracker opp_tracker_;
  double start_progress_ = 0.0;
  double alpha_prev_ = 0.0;
  double now_ = 0.0;
  int step_count_ = 0;
  int max_steps_ = 0;
  bool pass_armed_ = false;
  bool pass_completed_ = false;
  bool done_ = true;
  Rng spawn_rng_;
};

struct TrainOptions {
  long total_steps = 50000;
  uint64_t seed = 1;
  std::string out_dir;  // checkpoints + log; empty = no files
  int progress_every = 0;  // stderr progress period in steps; 0 = silent
};

struct EvalPoint {
  long step = 0;
  double mean_reward = 0.0;
  double success_rate = 0.0;
};

struct TrainResult {
  std::vector<EvalPoint> evals;
  GatePolicy best_policy;
  GatePolicy final_policy;
  std::string best_checkpoint;   // paths, empty when out_dir unset
  std::string final_checkpoint;
  std::string log_path;
};

// PPO training: rollouts with the stochastic gate and opponent masking,
// running observation normalization, periodic deterministic evaluation on
// fixed seeds, checkpointing, best-checkpoint selection by evaluation reward.
TrainResult train(const ScenarioConfig& scenario, const World& world,
                  const PpoHyperparams& hp, const TrainOptions& opts);

// deterministic evaluation episodes (mean action, no masking, base reward)
EvalPoint evaluate_policy(const GatePolicy& policy, const ScenarioConfig& scenario,
                          const World& world, int episodes, uint64_t seed_base, long step);

}  // namespace arbsim
