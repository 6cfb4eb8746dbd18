#pragma once

#include "arbsim/geometry.hpp"

namespace arbsim {

struct RewardConfig {
  double w_prog = 1.0;   // per meter of raceline progress
  double w_v = 0.01;     // speed bonus
  double w_sm = 0.05;    // gate smoothness penalty
  double w_risk = 0.5;   // clearance barrier weight
  double r_pass = 5.0;   // completed-pass bonus
  double terminal_collision = -10.0;
  double terminal_offtrack = -10.0;
  double barrier_radius = 0.8;  // m, barrier onset

  // conservative shaping toward the reference gate, decaying over training
  double shaping_initial = 0.2;
  double shaping_fraction = 0.3;  // fraction of total steps to reach zero
  double ref_d_activate = 3.0;    // m, alpha* = 0 above this clearance
  double ref_d_full = 1.0;        // m, alpha* = 1 below this clearance
};

// quadratic barrier: 0 above the onset radius, (1 - c/r_b)^2 below
inline double barrier_psi(double clearance, double r_b) {
  const double t = (r_b - clearance) / r_b;
  return t > 0.0 ? t * t : 0.0;
}

// reference gate for shaping only: linear ramp from fully-tracking (clear
// front) to fully-reactive (blocked front); never applied at deployment
inline double reference_gate(double d_front, const RewardConfig& cfg) {
  return clamp((cfg.ref_d_activate - d_front) / (cfg.ref_d_activate - cfg.ref_d_full), 0.0,
               1.0);
}

// lambda_t: linear decay from shaping_initial to zero over the first
// shaping_fraction of total steps
inline double shaping_weight(long step, long total_steps, const RewardConfig& cfg) {
  const double horizon = cfg.shaping_fraction * static_cast<double>(total_steps);
  if (horizon <= 0.0 || step >= horizon) return 0.0;
  return cfg.shaping_initial * (1.0 - static_cast<double>(step) / horizon);
}

struct TransitionContext {
  double progress_delta = 0.0;  // signed raceline arclength this step, m
  double speed = 0.0;
  double alpha = 0.0;
  double alpha_prev = 0.0;
  double clearance = 0.0;  // true front clearance c_t
  bool pass_event = false;
  bool collided = false;
  bool off_track = false;
};

// base reward: progress + speed - smoothness - barrier + pass bonus + terminal
double compute_reward(const TransitionContext& ctx, const RewardConfig& cfg);

// shaped reward: base minus lambda_t |alpha - alpha*|
double compute_shaped_reward(const TransitionContext& ctx, double d_front, double lambda_t,
                             const RewardConfig& cfg);

}  // namespace arbsim
