#pragma once

#include <vector>

#include "arbsim/geometry.hpp"

namespace arbsim {

struct VehicleParams {
  double wheelbase = 0.33;
  double steer_min = -0.4189;
  double steer_max = 0.4189;
  double speed_min = 0.0;
  double speed_max = 6.0;
  double collision_radius = 0.25;
  // first-order actuator lag time constants; <= 0 means instantaneous
  double steer_tau = 0.1;
  double speed_tau = 0.3;
};

struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // (-pi, pi]
  double speed = 0.0;    // >= 0
  double steering = 0.0; // current actuator value

  Vec2 pos() const { return {x, y}; }
};

struct AckermannCommand {
  double steering = 0.0;
  double speed = 0.0;
};

inline AckermannCommand saturate(const AckermannCommand& cmd, const VehicleParams& p) {
  return {clamp(cmd.steering, p.steer_min, p.steer_max),
          clamp(cmd.speed, p.speed_min, p.speed_max)};
}

struct LidarMeta {
  double angle_min = -0.75 * kPi;  // 270 deg fov, symmetric about forward
  double angle_max = 0.75 * kPi;
  int beam_count = 1080;
  double range_min = 0.05;
  double range_max = 10.0;

  double angle_of(int beam) const {
    return angle_min + (angle_max - angle_min) * beam / (beam_count - 1);
  }
  // first beam index with angle >= a (for cone extraction)
  double angle_step() const { return (angle_max - angle_min) / (beam_count - 1); }
};

struct LidarScan {
  double stamp = 0.0;  // sim time of capture
  LidarMeta meta;
  std::vector<double> ranges;

  double angle_of(int beam) const { return meta.angle_of(beam); }
  int beam_count() const { return meta.beam_count; }

  // inclusive index range of beams inside [a_lo, a_hi], clipped to the scan fov
  std::pair<int, int> cone_indices(double a_lo, double a_hi) const {
    const double step = meta.angle_step();
    int lo = static_cast<int>(std::ceil((a_lo - meta.angle_min) / step - 1e-12));
    int hi = static_cast<int>(std::floor((a_hi - meta.angle_min) / step + 1e-12));
    lo = lo < 0 ? 0 : lo;
    hi = hi >= meta.beam_count ? meta.beam_count - 1 : hi;
    return {lo, hi};
  }
};

struct ObstacleDisk {
  Vec2 center;
  double radius = 0.25;
};

}  // namespace arbsim
