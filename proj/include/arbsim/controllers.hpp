#pragma once

#include "arbsim/raceline.hpp"
#include "arbsim/types.hpp"

namespace arbsim {

struct PurePursuitConfig {
  double lookahead_base = 0.8;   // m
  double lookahead_gain = 0.25;  // s, L_d = base + gain * v
  double lookahead_min = 0.8;    // m
  double lookahead_max = 3.0;    // m
};

// Commanded curvature toward a lookahead point (x_d, y_d) in the vehicle
// frame: kappa = 2 y_d / d^2 with d^2 = x_d^2 + y_d^2. Zero when the point is
// numerically on top of the vehicle.
double pure_pursuit_curvature(const Vec2& local_target);

// delta = arctan(L * kappa)
double pure_pursuit_steering(const Vec2& local_target, double wheelbase);

// Geometric tracker. Picks the point the scheduled lookahead distance ahead of
// the nearest raceline point, expresses it in the vehicle frame and applies
// the curvature law above. Speed command is the raceline reference speed at
// the lookahead point.
AckermannCommand pure_pursuit(const VehicleState& ego, const Raceline& line,
                              const PurePursuitConfig& cfg, const VehicleParams& params);

struct GapFollowConfig {
  double bubble_radius = 0.45;        // m, obstacle inflation around the nearest beam
  double max_considered_range = 4.0;  // m
  double fov_used = kPi;              // rad, gap search restricted to +-fov/2
  int smooth_window = 5;              // beams (odd)
  double speed_fast = 4.0;
  double speed_mid = 2.0;
  double speed_slow = 1.0;
  double clear_fast = 3.0;  // forward clearance thresholds for the speed tiers
  double clear_mid = 1.5;
  double forward_sector = deg2rad(30.0);  // clearance sector width, symmetric
};

struct GapFollowResult {
  AckermannCommand cmd;
  bool no_gap = false;
  int target_beam = -1;
};

// Reactive follow-the-gap: clip + smooth the scan, zero a safety bubble around
// the nearest return, steer at the farthest beam of the widest surviving run
// inside the usable fov, and tier the speed by forward clearance.
GapFollowResult gap_follow(const LidarScan& scan, const GapFollowConfig& cfg,
                           const VehicleParams& params);

}  // namespace arbsim
