#include "arbsim/heat.hpp"

#include <chrono>
#include <cmath>

#include <json.hpp>

#include "arbsim/bicycle.hpp"
#include "arbsim/errors.hpp"
#include "arbsim/lidar.hpp"
#include "arbsim/metrics.hpp"

namespace arbsim {

const char* to_string(HeatOutcome o) {
  switch (o) {
    case HeatOutcome::success: return "success";
    case HeatOutcome::collision: return "collision";
    case HeatOutcome::offtrack: return "offtrack";
    case HeatOutcome::timeout: return "timeout";
  }
  return "timeout";
}

HeatOutcome outcome_from_string(const std::string& s) {
  if (s == "success") return HeatOutcome::success;
  if (s == "collision") return HeatOutcome::collision;
  if (s == "offtrack") return HeatOutcome::offtrack;
  if (s == "timeout") return HeatOutcome::timeout;
  throw ConfigError("unknown outcome '" + s + "'");
}

bool HeatRecord::deterministic_equal(const HeatRecord& o) const {
  return method == o.method && p_out == o.p_out && seed == o.seed &&
         heat_index == o.heat_index && outcome == o.outcome &&
         pass_completed == o.pass_completed && unsafe_flag == o.unsafe_flag &&
         crashed == o.crashed && sim_duration == o.sim_duration &&
         control_steps == o.control_steps && min_clearance == o.min_clearance &&
         max_cross_track == o.max_cross_track && clearance_trace == o.clearance_trace &&
         events == o.events;
}

std::string HeatRecord::to_jsonl() const {
  nlohmann::json j;
  j["method"] = method;
  j["p_out"] = p_out;
  j["seed"] = seed;
  j["heat_index"] = heat_index;
  j["outcome"] = to_string(outcome);
  j["pass_completed"] = pass_completed;
  j["unsafe"] = unsafe_flag;
  j["crashed"] = crashed;
  j["sim_duration"] = sim_duration;
  j["control_steps"] = control_steps;
  j["min_clearance"] = min_clearance;
  j["max_cross_track"] = max_cross_track;
  j["clearance_trace"] = clearance_trace;
  j["runtime_ms"] = runtime_ms;
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& e : events) ev.push_back({{"step", e.step}, {"type", e.type}, {"detail", e.detail}});
  j["events"] = ev;
  return j.dump();
}

HeatRecord HeatRecord::from_jsonl(const std::string& line) {
  const nlohmann::json j = nlohmann::json::parse(line);
  HeatRecord r;
  r.method = j.at("method");
  r.p_out = j.at("p_out");
  r.seed = j.at("seed");
  r.heat_index = j.at("heat_index");
  r.outcome = outcome_from_string(j.at("outcome"));
  r.pass_completed = j.at("pass_completed");
  r.unsafe_flag = j.at("unsafe");
  r.crashed = j.at("crashed");
  r.sim_duration = j.at("sim_duration");
  r.control_steps = j.at("control_steps");
  r.min_clearance = j.at("min_clearance");
  r.max_cross_track = j.at("max_cross_track");
  r.clearance_trace = j.at("clearance_trace").get<std::vector<double>>();
  r.runtime_ms = j.at("runtime_ms").get<std::vector<double>>();
  for (const auto& e : j.at("events"))
    r.events.push_back({e.at("step"), e.at("type"), e.at("detail")});
  return r;
}

namespace {

class ArbiterController : public HighLevelController {
 public:
  ArbiterController(const ScenarioConfig& sc, GatePolicy policy)
      : arbiter_(std::move(policy), sc.arbiter, sc.safety, sc.observation, sc.pure_pursuit,
                 sc.gap_follow, sc.vehicle, 0) {}

  std::string name() const override { return "arbiter"; }
  void reset(uint64_t seed) override { arbiter_.reset(seed); }

  AckermannCommand step(const MessageBus& bus, const Raceline& line, double now,
                        ControllerDiag* diag) override {
    ArbiterDiag ad;
    const AckermannCommand cmd = arbiter_.step(bus, line, now, &ad);
    if (diag) {
      diag->interaction = ad.interaction;
      diag->overridden = ad.overridden;
      diag->override_reason = ad.override_reason;
      diag->alpha_exec = ad.alpha_exec;
    }
    return cmd;
  }

 private:
  Arbiter arbiter_;
};

class MpcController : public HighLevelController {
 public:
  explicit MpcController(const ScenarioConfig& sc)
      : mpc_(sc.mpc, sc.observation, sc.vehicle) {}

  std::string name() const override { return "mpc"; }
  void reset(uint64_t) override { mpc_.reset(); }

  AckermannCommand step(const MessageBus& bus, const Raceline& line, double now,
                        ControllerDiag* diag) override {
    MpcDiag md;
    const AckermannCommand cmd = mpc_.step(bus, line, now, &md);
    if (diag) {
      diag->interaction = md.interaction;
      diag->overridden = md.selected < 0;
      diag->override_reason = md.selected < 0 ? "all_infeasible" : "";
    }
    return cmd;
  }

 private:
  SamplingMpc mpc_;
};

class PurePursuitController : public HighLevelController {
 public:
  explicit PurePursuitController(const ScenarioConfig& sc)
      : cfg_(sc.pure_pursuit), params_(sc.vehicle) {}

  std::string name() const override { return "pure_pursuit"; }
  void reset(uint64_t) override {}

  AckermannCommand step(const MessageBus& bus, const Raceline& line, double,
                        ControllerDiag*) override {
    const VehicleState* ego = bus.latest_as<VehicleState>(topics::kEgoOdom);
    if (!ego) return {0.0, 0.0};
    return pure_pursuit(*ego, line, cfg_, params_);
  }

 private:
  PurePursuitConfig cfg_;
  VehicleParams params_;
};

VehicleState spawn_on_raceline(const Raceline& line, double s) {
  VehicleState v;
  const Vec2 p = line.point_at(s);
  v.x = p.x;
  v.y = p.y;
  v.heading = line.tangent_heading_at(s);
  v.speed = 0.0;
  v.steering = 0.0;
  return v;
}

}  // namespace

std::unique_ptr<HighLevelController> make_arbiter_controller(const ScenarioConfig& scenario,
                                                             GatePolicy policy) {
  return std::make_unique<ArbiterController>(scenario, std::move(policy));
}

std::unique_ptr<HighLevelController> make_mpc_controller(const ScenarioConfig& scenario) {
  return std::make_unique<MpcController>(scenario);
}

std::unique_ptr<HighLevelController> make_pure_pursuit_controller(
    const ScenarioConfig& scenario) {
  return std::make_unique<PurePursuitController>(scenario);
}

HeatRecord run_heat(const ScenarioConfig& sc, const World& world,
                    HighLevelController& controller, uint64_t seed, int heat_index) {
  HeatRecord rec;
  rec.method = controller.name();
  rec.p_out = sc.impairments.p_out;
  rec.seed = seed;
  rec.heat_index = heat_index;
  rec.min_clearance = std::numeric_limits<double>::infinity();

  const uint64_t heat_seed = mix_seed(seed, static_cast<uint64_t>(heat_index));
  Rng spawn_rng(mix_seed(heat_seed, 1));

  // spawns jitter per heat so the heats of one seed differ
  const double s_ego = sc.spawn.ego_arclength + spawn_rng.uniform(0.0, sc.spawn.ego_jitter);
  VehicleState ego = spawn_on_raceline(world.raceline, s_ego);
  const bool with_opp = sc.spawn.opponent_present;
  VehicleState opp;
  if (with_opp) {
    const double gap = spawn_rng.uniform(sc.spawn.gap_min, sc.spawn.gap_max);
    opp = spawn_on_raceline(world.raceline, s_ego + gap);
  }

  if (world.track.occupied_at(ego.pos()))
    throw EgoOutOfBounds("ego spawned inside an occupied cell");

  ImpairmentState imp_state;
  imp_state.reset(mix_seed(heat_seed, 2));
  controller.reset(mix_seed(heat_seed, 3));

  RacelineTracker ego_tracker(world.raceline), opp_tracker(world.raceline);
  ego_tracker.reset(ego.pos());
  if (with_opp) opp_tracker.reset(opp.pos());
  const double lap_length = world.raceline.total_length();
  const double ego_start_progress = ego_tracker.progress();

  MessageBus bus;
  const double ts = sc.control_period();
  const double sub_dt = ts / sc.physics_substeps;
  const int max_steps = static_cast<int>(std::ceil(sc.timeout / ts));

  bool pass_armed = false;
  bool last_interaction = false;
  double end_time = std::numeric_limits<double>::infinity();  // set after a pass
  bool outcome_decided = false;

  for (int k = 0; k < max_steps; ++k) {
    const double now = k * ts;

    // sensing
    std::vector<ObstacleDisk> disks;
    if (with_opp) disks.push_back({opp.pos(), sc.vehicle.collision_radius});
    const LidarScan clean = simulate_lidar(ego, world.track, disks, sc.lidar, now);
    bus.publish(topics::kScan, now, clean);
    if (auto impaired = impair_stream(clean, now, sc.impairments, imp_state))
      bus.publish(topics::kScanImpaired, impaired->stamp, *impaired);
    bus.publish(topics::kEgoOdom, now, ego);
    if (with_opp) bus.publish(topics::kOppOdom, now, opp);

    // true clearance judged against reality, not the impaired stream
    const double c_true = front_clearance_min(clean, sc.safety.front_cone);
    rec.clearance_trace.push_back(c_true);
    rec.min_clearance = std::min(rec.min_clearance, c_true);

    // controller step, timed end to end
    ControllerDiag diag;
    const auto t0 = std::chrono::steady_clock::now();
    AckermannCommand cmd = controller.step(bus, world.raceline, now, &diag);
    const auto t1 = std::chrono::steady_clock::now();
    rec.runtime_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    cmd = saturate(cmd, sc.vehicle);

    if (diag.interaction != last_interaction) {
      rec.events.push_back({k, diag.interaction ? "interaction_on" : "interaction_off", ""});
      last_interaction = diag.interaction;
    }
    if (diag.overridden) rec.events.push_back({k, "override", diag.override_reason});

    AckermannCommand opp_cmd{0.0, 0.0};
    if (with_opp) {
      opp_cmd = pure_pursuit(opp, world.raceline, sc.pure_pursuit, sc.vehicle);
      opp_cmd.speed *= sc.opponent_speed_factor;
      opp_cmd = saturate(opp_cmd, sc.vehicle);
    }

    // plant integration with collision checks per substep
    for (int j = 0; j < sc.physics_substeps && !outcome_decided; ++j) {
      ego = step_bicycle(ego, cmd, sc.vehicle, sub_dt);
      if (with_opp) opp = step_bicycle(opp, opp_cmd, sc.vehicle, sub_dt);
      if (with_opp &&
          (ego.pos() - opp.pos()).norm() < 2.0 * sc.vehicle.collision_radius) {
        rec.outcome = HeatOutcome::collision;
        outcome_decided = true;
        rec.events.push_back({k, "collision", ""});
      } else if (world.track.disk_hits_wall(ego.pos(), sc.vehicle.collision_radius)) {
        rec.outcome = HeatOutcome::offtrack;
        outcome_decided = true;
        rec.events.push_back({k, "offtrack", ""});
      }
    }

    rec.control_steps = k + 1;
    rec.sim_duration = (k + 1) * ts;
    if (outcome_decided) break;

    // progress accounting
    const double ego_prog = ego_tracker.update(ego.pos());
    const double cte = (ego.pos() - world.raceline.point_at(
                                        world.raceline.nearest_arclength(ego.pos())))
                           .norm();
    rec.max_cross_track = std::max(rec.max_cross_track, cte);

    if (with_opp) {
      opp_tracker.update(opp.pos());
      const double rel = wrap_s_diff(
          world.raceline.nearest_arclength(ego.pos()) -
              world.raceline.nearest_arclength(opp.pos()),
          lap_length);
      if (rel < -sc.pass_rearm) pass_armed = true;
      if (pass_armed && rel > sc.pass_margin) {
        pass_armed = false;
        rec.pass_completed = true;
        rec.events.push_back({k, "pass", ""});
        if (!std::isfinite(end_time)) end_time = now + sc.pass_grace;
      }
    } else {
      // unobstructed run: one full lap counts as success
      if (ego_prog - ego_start_progress >= lap_length) {
        rec.outcome = HeatOutcome::success;
        outcome_decided = true;
        rec.events.push_back({k, "lap_complete", ""});
        break;
      }
    }

    if (now + ts >= end_time) {
      rec.outcome = HeatOutcome::success;
      outcome_decided = true;
      break;
    }
  }

  if (!outcome_decided)
    rec.outcome = rec.pass_completed ? HeatOutcome::success : HeatOutcome::timeout;

  rec.unsafe_flag = unsafe_proximity(rec.clearance_trace);
  return rec;
}

}  // namespace arbsim
