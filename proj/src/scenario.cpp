#include "arbsim/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "arbsim/errors.hpp"

namespace arbsim {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

void merge_file(const std::string& path, ConfigSections& out, int depth) {
  if (depth > 8) throw ConfigError("config include chain too deep at " + path);
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  const std::filesystem::path dir = std::filesystem::path(path).parent_path();
  std::string line, section;
  while (std::getline(f, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("malformed config line '" + line + "' in " + path);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty() && key == "include") {
      merge_file((dir / value).string(), out, depth + 1);
      continue;
    }
    out[section][key] = value;
  }
}

class SectionReader {
 public:
  SectionReader(const ConfigSections& sections, const std::string& name)
      : name_(name) {
    auto it = sections.find(name);
    if (it != sections.end()) kv_ = it->second;
  }

  ~SectionReader() = default;

  void take(const std::string& key, double& out) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return;
    try {
      out = std::stod(it->second);
    } catch (...) {
      throw ConfigError("bad numeric value for " + name_ + "." + key);
    }
    kv_.erase(it);
  }
  void take(const std::string& key, int& out) {
    double v = out;
    take(key, v);
    out = static_cast<int>(v);
  }
  void take(const std::string& key, bool& out) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return;
    if (it->second == "true" || it->second == "1") out = true;
    else if (it->second == "false" || it->second == "0") out = false;
    else throw ConfigError("bad boolean for " + name_ + "." + key);
    kv_.erase(it);
  }
  void take(const std::string& key, std::string& out) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return;
    out = it->second;
    kv_.erase(it);
  }
  void take_deg(const std::string& key, double& out_rad) {
    double deg = out_rad * 180.0 / kPi;
    take(key, deg);
    out_rad = deg2rad(deg);
  }
  void take_seeds(const std::string& key, std::vector<uint64_t>& out) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return;
    out.clear();
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (!tok.empty()) out.push_back(std::stoull(tok));
    }
    if (out.empty()) throw ConfigError("empty seed list in " + name_);
    kv_.erase(it);
  }

  void finish() const {
    if (!kv_.empty())
      throw ConfigError("unknown key '" + kv_.begin()->first + "' in section [" + name_ + "]");
  }

 private:
  std::string name_;
  std::map<std::string, std::string> kv_;
};

void validate(const ScenarioConfig& c) {
  if (c.control_rate <= 0) throw ConfigError("control_rate must be positive");
  if (c.physics_substeps < 1) throw ConfigError("physics_substeps must be >= 1");
  if (c.timeout <= 0) throw ConfigError("timeout must be positive");
  if (c.opponent_speed_factor <= 0 || c.opponent_speed_factor >= 1)
    throw ConfigError("opponent_speed_factor must lie in (0, 1)");
  if (c.vehicle.wheelbase <= 0) throw ConfigError("wheelbase must be positive");
  if (!(c.vehicle.steer_min < 0 && 0 < c.vehicle.steer_max))
    throw ConfigError("steering limits must straddle zero");
  if (c.vehicle.speed_min < 0 || c.vehicle.speed_min >= c.vehicle.speed_max)
    throw ConfigError("speed limits must satisfy 0 <= min < max");
  if (c.safety.tau_max <= c.control_period())
    throw ConfigError("safety tau_max must exceed the control period");
  if (c.mpc.horizon < 1 || c.mpc.m_standard < 1 || c.mpc.m_interaction < 1)
    throw ConfigError("mpc horizon and candidate counts must be >= 1");
  if (c.mpc.m_standard % 2 == 0 || c.mpc.m_interaction % 2 == 0)
    throw ConfigError("mpc candidate counts must be odd (symmetric fan)");
  if (c.impairments.p_drop < 0 || c.impairments.p_drop > 1 || c.impairments.p_out < 0 ||
      c.impairments.p_out > 1)
    throw ConfigError("impairment probabilities must lie in [0, 1]");
  if (c.gap_follow.speed_slow >= c.gap_follow.speed_mid ||
      c.gap_follow.speed_mid >= c.gap_follow.speed_fast)
    throw ConfigError("gap follow speed tiers must increase");
}

}  // namespace

ConfigSections read_config_file(const std::string& path) {
  ConfigSections sections;
  merge_file(path, sections, 0);
  return sections;
}

ScenarioConfig scenario_from_sections(const ConfigSections& sections) {
  ScenarioConfig c;
  for (const auto& [name, _] : sections) {
    static const char* known[] = {"scenario",    "spawn",      "vehicle", "lidar",
                                  "pure_pursuit", "gap_follow", "observation", "arbiter",
                                  "safety",      "mpc",        "impairments", "reward"};
    bool ok = false;
    for (const char* k : known) ok = ok || name == k;
    if (!ok) throw ConfigError("unknown config section [" + name + "]");
  }

  {
    SectionReader s(sections, "scenario");
    s.take("name", c.name);
    s.take("track", c.track);
    s.take("raceline", c.raceline);
    s.take("timeout", c.timeout);
    s.take("pass_grace", c.pass_grace);
    s.take("pass_margin", c.pass_margin);
    s.take("pass_rearm", c.pass_rearm);
    s.take("control_rate", c.control_rate);
    s.take("physics_substeps", c.physics_substeps);
    s.take("opponent_speed_factor", c.opponent_speed_factor);
    s.take("heats", c.heats);
    s.take_seeds("seeds", c.seeds);
    s.finish();
  }
  {
    SectionReader s(sections, "spawn");
    s.take("ego_arclength", c.spawn.ego_arclength);
    s.take("ego_jitter", c.spawn.ego_jitter);
    s.take("gap_min", c.spawn.gap_min);
    s.take("gap_max", c.spawn.gap_max);
    s.take("opponent", c.spawn.opponent_present);
    s.finish();
  }
  {
    SectionReader s(sections, "vehicle");
    s.take("wheelbase", c.vehicle.wheelbase);
    s.take("steer_min", c.vehicle.steer_min);
    s.take("steer_max", c.vehicle.steer_max);
    s.take("speed_min", c.vehicle.speed_min);
    s.take("speed_max", c.vehicle.speed_max);
    s.take("collision_radius", c.vehicle.collision_radius);
    s.take("steer_tau", c.vehicle.steer_tau);
    s.take("speed_tau", c.vehicle.speed_tau);
    s.finish();
  }
  {
    SectionReader s(sections, "lidar");
    s.take("beams", c.lidar.beam_count);
    double fov = c.lidar.angle_max - c.lidar.angle_min;
    s.take_deg("fov", fov);
    c.lidar.angle_min = -fov / 2;
    c.lidar.angle_max = fov / 2;
    s.take("range_min", c.lidar.range_min);
    s.take("range_max", c.lidar.range_max);
    s.finish();
  }
  {
    SectionReader s(sections, "pure_pursuit");
    s.take("lookahead_base", c.pure_pursuit.lookahead_base);
    s.take("lookahead_gain", c.pure_pursuit.lookahead_gain);
    s.take("lookahead_min", c.pure_pursuit.lookahead_min);
    s.take("lookahead_max", c.pure_pursuit.lookahead_max);
    s.finish();
  }
  {
    SectionReader s(sections, "gap_follow");
    s.take("bubble_radius", c.gap_follow.bubble_radius);
    s.take("max_considered_range", c.gap_follow.max_considered_range);
    s.take_deg("fov", c.gap_follow.fov_used);
    s.take("smooth_window", c.gap_follow.smooth_window);
    s.take("speed_fast", c.gap_follow.speed_fast);
    s.take("speed_mid", c.gap_follow.speed_mid);
    s.take("speed_slow", c.gap_follow.speed_slow);
    s.take("clear_fast", c.gap_follow.clear_fast);
    s.take("clear_mid", c.gap_follow.clear_mid);
    s.take_deg("forward_sector", c.gap_follow.forward_sector);
    s.finish();
  }
  {
    SectionReader s(sections, "observation");
    s.take("curv_s1", c.observation.curv_s1);
    s.take("curv_s2", c.observation.curv_s2);
    s.take_deg("front_cone", c.observation.front_cone);
    s.take("front_percentile", c.observation.front_percentile);
    s.take("fill_d_opp", c.observation.fill_d_opp);
    s.finish();
  }
  {
    SectionReader s(sections, "arbiter");
    s.take("beta_lpf", c.arbiter.beta_lpf);
    s.take("activate_dist", c.arbiter.interaction.activate_dist);
    s.take("headway_dist", c.arbiter.interaction.headway_dist);
    s.take("n_on", c.arbiter.interaction.n_on);
    s.take("n_off", c.arbiter.interaction.n_off);
    s.take("p_mask", c.arbiter.p_mask);
    s.finish();
  }
  {
    SectionReader s(sections, "safety");
    s.take("c_min", c.safety.c_min);
    s.take("tau_max", c.safety.tau_max);
    s.take_deg("front_cone", c.safety.front_cone);
    s.finish();
  }
  {
    SectionReader s(sections, "mpc");
    s.take("horizon", c.mpc.horizon);
    s.take("dt", c.mpc.dt);
    s.take("m_standard", c.mpc.m_standard);
    s.take("m_interaction", c.mpc.m_interaction);
    s.take("span_standard", c.mpc.span_standard);
    s.take("span_interaction", c.mpc.span_interaction);
    s.take("r_safe", c.mpc.r_safe);
    s.take("w_trk_standard", c.mpc.w_trk_standard);
    s.take("w_delta_standard", c.mpc.w_delta_standard);
    s.take("w_prog_standard", c.mpc.w_prog_standard);
    s.take("w_obs_standard", c.mpc.w_obs_standard);
    s.take("w_trk_interaction", c.mpc.w_trk_interaction);
    s.take("w_delta_interaction", c.mpc.w_delta_interaction);
    s.take("w_prog_interaction", c.mpc.w_prog_interaction);
    s.take("w_obs_interaction", c.mpc.w_obs_interaction);
    s.take("phi_onset", c.mpc.phi_onset);
    s.take("j_penalty", c.mpc.j_penalty);
    s.take("speed_floor_interaction", c.mpc.speed_floor_interaction);
    s.finish();
    c.mpc.interaction = c.arbiter.interaction;  // shared automaton thresholds
  }
  {
    SectionReader s(sections, "impairments");
    s.take("noise_sigma", c.impairments.noise_sigma);
    s.take("delay", c.impairments.delay);
    s.take("p_drop", c.impairments.p_drop);
    s.take("p_out", c.impairments.p_out);
    s.take("f_out", c.impairments.f_out);
    s.take("r_out", c.impairments.r_out);
    s.take_deg("cone", c.impairments.cone);
    s.finish();
  }
  {
    SectionReader s(sections, "reward");
    s.take("w_prog", c.reward.w_prog);
    s.take("w_v", c.reward.w_v);
    s.take("w_sm", c.reward.w_sm);
    s.take("w_risk", c.reward.w_risk);
    s.take("r_pass", c.reward.r_pass);
    s.take("terminal_collision", c.reward.terminal_collision);
    s.take("terminal_offtrack", c.reward.terminal_offtrack);
    s.take("barrier_radius", c.reward.barrier_radius);
    s.take("shaping_initial", c.reward.shaping_initial);
    s.take("shaping_fraction", c.reward.shaping_fraction);
    s.take("ref_d_activate", c.reward.ref_d_activate);
    s.take("ref_d_full", c.reward.ref_d_full);
    s.finish();
  }

  validate(c);
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  return scenario_from_sections(read_config_file(path));
}

World load_world(const ScenarioConfig& scenario) {
  World w;
  if (scenario.track.rfind("synthetic:", 0) == 0) {
    const SyntheticTrack st = make_track_by_name(scenario.track.substr(10));
    w.track = st.track;
    w.raceline = st.raceline;
    return w;
  }
  w.track = Track::load(scenario.track);
  if (scenario.raceline.empty())
    throw ConfigError("raceline file required with a track file");
  w.raceline = Raceline::load_csv(scenario.raceline);
  // raceline must live in free space
  for (const auto& wp : w.raceline.wp)
    if (w.track.occupied_at(wp.p))
      throw ConfigError("raceline waypoint inside an occupied cell");
  return w;
}

}  // namespace arbsim
