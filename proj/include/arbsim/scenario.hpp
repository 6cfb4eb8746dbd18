#pragma once

#include <map>
#include <string>
#include <vector>

#include "arbsim/arbiter.hpp"
#include "arbsim/controllers.hpp"
#include "arbsim/impairments.hpp"
#include "arbsim/mpc.hpp"
#include "arbsim/observation.hpp"
#include "arbsim/reward.hpp"
#include "arbsim/synthetic_tracks.hpp"
#include "arbsim/types.hpp"

namespace arbsim {

struct SpawnConfig {
  double ego_arclength = 0.0;
  double ego_jitter = 2.0;  // uniform [0, jitter) per heat
  double gap_min = 6.0;     // opponent spawned this far ahead of the ego
  double gap_max = 10.0;
  bool opponent_present = true;
};

struct ScenarioConfig {
  std::string name = "scenario";
  // either file paths or "synthetic:<name>" for built-in circuits
  std::string track = "synthetic:oval";
  std::string raceline;  // empty with synthetic tracks

  double timeout = 60.0;       // s
  double pass_grace = 3.0;     // s simulated beyond a completed pass
  double pass_margin = 1.0;    // m of relative arclength to count a pass
  double pass_rearm = 0.5;     // m behind before the next pass can arm
  double control_rate = 30.0;  // Hz
  int physics_substeps = 4;
  double opponent_speed_factor = 0.6;
  int heats = 10;
  std::vector<uint64_t> seeds{1, 2, 3};

  SpawnConfig spawn;
  VehicleParams vehicle;
  LidarMeta lidar;
  PurePursuitConfig pure_pursuit;
  GapFollowConfig gap_follow;
  ObservationConfig observation;
  ArbiterConfig arbiter;
  SafetyConfig safety;
  SamplingMpcConfig mpc;
  ImpairmentConfig impairments;
  RewardConfig reward;

  double control_period() const { return 1.0 / control_rate; }
};

// Layered key-value scenario file: `[section]` headers, `key = value` lines,
// `#` comments, and a top-level `include = <path>` processed before the
// including file so later keys override. Unknown sections or keys are errors.
ScenarioConfig load_scenario(const std::string& path);

// parse from pre-merged section/key/value maps (exposed for the sweep overlay)
using ConfigSections = std::map<std::string, std::map<std::string, std::string>>;
ConfigSections read_config_file(const std::string& path);
ScenarioConfig scenario_from_sections(const ConfigSections& sections);

struct World {
  Track track;
  Raceline raceline;
};

World load_world(const ScenarioConfig& scenario);

}  // namespace arbsim
