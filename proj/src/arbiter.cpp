#include "arbsim/arbiter.hpp"

#include "arbsim/errors.hpp"

namespace arbsim {

bool InteractionDetector::update(double d_front, double d_opp, const InteractionConfig& cfg) {
  const bool constrained = d_front < cfg.activate_dist && d_opp < cfg.headway_dist;
  const bool cleared = d_front >= cfg.activate_dist && d_opp >= cfg.headway_dist;
  if (!active_) {
    on_streak_ = constrained ? on_streak_ + 1 : 0;
    if (on_streak_ >= cfg.n_on) {
      active_ = true;
      off_streak_ = 0;
    }
  } else {
    off_streak_ = cleared ? off_streak_ + 1 : 0;
    if (off_streak_ >= cfg.n_off) {
      active_ = false;
      on_streak_ = 0;
    }
  }
  return active_;
}

void InteractionDetector::reset() {
  active_ = false;
  on_streak_ = 0;
  off_streak_ = 0;
}

AckermannCommand fuse(const AckermannCommand& u_pp, const AckermannCommand& u_gf,
                      double alpha_exec, const VehicleParams& params) {
  if (alpha_exec == 0.0) return saturate(u_pp, params);
  if (alpha_exec == 1.0) return saturate(u_gf, params);
  AckermannCommand out;
  out.steering = (1.0 - alpha_exec) * u_pp.steering + alpha_exec * u_gf.steering;
  out.speed = (1.0 - alpha_exec) * u_pp.speed + alpha_exec * u_gf.speed;
  return saturate(out, params);
}

AckermannCommand safety_override(const AckermannCommand& cmd, double c_t,
                                 std::optional<double> scan_age,
                                 std::optional<double> odom_age, const SafetyConfig& cfg,
                                 std::string* reason) {
  if (!scan_age.has_value() || *scan_age > cfg.tau_max) {
    if (reason) *reason = "scan_stale";
    return {0.0, 0.0};
  }
  if (!odom_age.has_value() || *odom_age > cfg.tau_max) {
    if (reason) *reason = "odom_stale";
    return {0.0, 0.0};
  }
  if (c_t < cfg.c_min) {
    if (reason) *reason = "clearance";
    return {0.0, 0.0};
  }
  if (reason) reason->clear();
  return cmd;
}

Arbiter::Arbiter(GatePolicy policy, const ArbiterConfig& cfg, const SafetyConfig& safety,
                 const ObservationConfig& obs_cfg, const PurePursuitConfig& pp_cfg,
                 const GapFollowConfig& gf_cfg, const VehicleParams& params, uint64_t seed)
    : policy_(std::move(policy)),
      cfg_(cfg),
      safety_(safety),
      obs_cfg_(obs_cfg),
      pp_cfg_(pp_cfg),
      gf_cfg_(gf_cfg),
      params_(params),
      mask_rng_(seed) {
  mask_cfg_.p_mask = cfg_.p_mask;
  mask_cfg_.fill = obs_cfg_;
}

void Arbiter::reset(uint64_t seed) {
  alpha_bar_ = 0.0;
  detector_.reset();
  mask_rng_.reseed(seed);
}

AckermannCommand Arbiter::step(const MessageBus& bus, const Raceline& line, double now,
                               ArbiterDiag* diag) {
  const VehicleState* ego = bus.latest_as<VehicleState>(topics::kEgoOdom);
  const LidarScan* scan = bus.latest_as<LidarScan>(topics::kScanImpaired);
  const VehicleState* opp = bus.latest_as<VehicleState>(topics::kOppOdom);
  const std::optional<double> scan_age = bus.age(topics::kScanImpaired, now);
  const std::optional<double> odom_age = bus.age(topics::kEgoOdom, now);

  ArbiterDiag local;
  ArbiterDiag& d = diag ? *diag : local;

  if (!ego || !scan) {
    d.overridden = true;
    d.override_reason = !scan ? "scan_stale" : "odom_stale";
    return {0.0, 0.0};
  }

  // both candidates queried side by side every step
  d.u_pp = pure_pursuit(*ego, line, pp_cfg_, params_);
  const GapFollowResult gf = gap_follow(*scan, gf_cfg_, params_);
  d.u_gf = gf.cmd;

  d.obs = build_observation(*ego, line, *scan, opp, obs_cfg_);
  if (cfg_.p_mask > 0.0) {
    const bool m = !mask_rng_.bernoulli(cfg_.p_mask);
    d.obs = mask_opponent(d.obs, m, mask_cfg_);
  }

  AckermannCommand fused;
  try {
    const auto arr = d.obs.to_array();
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(arr.data(), arr.size());
    const GateOutput g = policy_.forward_normalized(policy_.normalizer().normalize(x));
    d.alpha_raw = g.alpha;
  } catch (const NonFiniteActivation&) {
    d.fault = true;
    d.overridden = true;
    d.override_reason = "policy_fault";
    return {0.0, 0.0};
  }

  alpha_bar_ = smooth_gate(alpha_bar_, d.alpha_raw, cfg_.beta_lpf);
  d.alpha_bar = alpha_bar_;
  d.interaction = detector_.update(d.obs.d_front, d.obs.d_opp, cfg_.interaction);
  d.alpha_exec = d.interaction ? alpha_bar_ : 0.0;

  fused = fuse(d.u_pp, d.u_gf, d.alpha_exec, params_);

  const double c_t = front_clearance_min(*scan, safety_.front_cone);
  const AckermannCommand out =
      safety_override(fused, c_t, scan_age, odom_age, safety_, &d.override_reason);
  d.overridden = !d.override_reason.empty();
  return out;
}

}  // namespace arbsim
