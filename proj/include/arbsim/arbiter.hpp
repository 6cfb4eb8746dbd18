#pragma once

#include <optional>
#include <string>

#include "arbsim/bus.hpp"
#include "arbsim/controllers.hpp"
#include "arbsim/gate_policy.hpp"
#include "arbsim/observation.hpp"

namespace arbsim {

// exponential gate filter: alpha_bar' = (1 - beta) alpha_bar + beta alpha
inline double smooth_gate(double alpha_bar_prev, double alpha, double beta_lpf) {
  return (1.0 - beta_lpf) * alpha_bar_prev + beta_lpf * alpha;
}

struct InteractionConfig {
  double activate_dist = 4.0;  // m, front constrained below this
  double headway_dist = 5.0;   // m, opponent within this
  int n_on = 3;                // consecutive constrained steps to activate
  int n_off = 10;              // consecutive cleared steps to deactivate
};

// Hysteresis automaton for the interaction-mode flag. Activation needs a
// persistently constrained front AND a leading agent inside the headway;
// deactivation needs both conditions cleared for n_off consecutive steps.
// Shared by the arbiter and the sampling baseline so both switch modes on
// identical evidence.
class InteractionDetector {
 public:
  bool update(double d_front, double d_opp, const InteractionConfig& cfg);
  bool active() const { return active_; }
  void reset();

 private:
  bool active_ = false;
  int on_streak_ = 0;
  int off_streak_ = 0;
};

// convex combination of the two candidate commands, then saturation
AckermannCommand fuse(const AckermannCommand& u_pp, const AckermannCommand& u_gf,
                      double alpha_exec, const VehicleParams& params);

struct SafetyConfig {
  double c_min = 0.25;                    // m, minimum front clearance before a stop
  double tau_max = 0.5;                   // s, input staleness timeout
  double front_cone = deg2rad(40.0);      // clearance sector
};

// Stop override: zero command when the measured front clearance dips below
// c_min or any required input is older than tau_max (missing counts as stale).
AckermannCommand safety_override(const AckermannCommand& cmd, double c_t,
                                 std::optional<double> scan_age,
                                 std::optional<double> odom_age, const SafetyConfig& cfg,
                                 std::string* reason = nullptr);

struct ArbiterConfig {
  double beta_lpf = 0.3;
  InteractionConfig interaction;
  // evaluation-time masking; 0 uses opponent odometry, 1 is the LiDAR-only variant
  double p_mask = 0.0;
};

struct ArbiterDiag {
  Observation obs;
  AckermannCommand u_pp;
  AckermannCommand u_gf;
  double alpha_raw = 0.0;
  double alpha_bar = 0.0;
  double alpha_exec = 0.0;
  bool interaction = false;
  bool overridden = false;
  bool fault = false;
  std::string override_reason;
};

// One deployment-side arbiter instance: queries both controllers, evaluates
// the gate policy on the masked/normalized observation, smooths, applies
// interaction-mode gating and the safety override, and returns the drive
// command for this control step.
class Arbiter {
 public:
  Arbiter(GatePolicy policy, const ArbiterConfig& cfg, const SafetyConfig& safety,
          const ObservationConfig& obs_cfg, const PurePursuitConfig& pp_cfg,
          const GapFollowConfig& gf_cfg, const VehicleParams& params, uint64_t seed);

  void reset(uint64_t seed);

  AckermannCommand step(const MessageBus& bus, const Raceline& line, double now,
                        ArbiterDiag* diag = nullptr);

  const GatePolicy& policy() const { return policy_; }
  GatePolicy& policy() { return policy_; }
  double alpha_bar() const { return alpha_bar_; }

 private:
  GatePolicy policy_;
  ArbiterConfig cfg_;
  SafetyConfig safety_;
  ObservationConfig obs_cfg_;
  PurePursuitConfig pp_cfg_;
  GapFollowConfig gf_cfg_;
  VehicleParams params_;
  double alpha_bar_ = 0.0;
  InteractionDetector detector_;
  MaskConfig mask_cfg_;
  Rng mask_rng_;
};

}  // namespace arbsim
