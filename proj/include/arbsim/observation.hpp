#pragma once

#include <array>

#include "arbsim/raceline.hpp"
#include "arbsim/types.hpp"

namespace arbsim {

// The arbiter's compact feature state: ego speed, three upcoming raceline
// curvature samples plus their spread, robust forward clearance, and the
// relative opponent block (distance, bearing encoded as sin/cos, speed delta).
struct Observation {
  static constexpr int kDim = 10;

  double v = 0.0;
  double kappa0 = 0.0;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double dkappa = 0.0;
  double d_front = 0.0;
  double d_opp = 0.0;
  double sin_beta = 0.0;
  double cos_beta = 1.0;
  double dv = 0.0;

  std::array<double, kDim> to_array() const {
    return {v, kappa0, kappa1, kappa2, dkappa, d_front, d_opp, sin_beta, cos_beta, dv};
  }
  static Observation from_array(const std::array<double, kDim>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8], a[9]};
  }
  bool finite() const;
};

struct ObservationConfig {
  double curv_s1 = 2.0;  // arclengths ahead for kappa1 / kappa2 samples
  double curv_s2 = 4.0;
  double front_cone = deg2rad(40.0);  // symmetric forward fov for d_front
  double front_percentile = 0.05;     // low percentile of cone beams
  // opponent fill for masked / absent opponents ("far or unknown")
  double fill_d_opp = 20.0;
  double fill_sin_beta = 0.0;
  double fill_cos_beta = 1.0;
  double fill_dv = 0.0;
};

// low percentile of the beams inside the symmetric forward cone
double front_clearance_percentile(const LidarScan& scan, double cone, double percentile);

// plain minimum over the forward cone (the safety monitor's c_t)
double front_clearance_min(const LidarScan& scan, double cone);

Observation build_observation(const VehicleState& ego, const Raceline& line,
                              const LidarScan& scan, const VehicleState* opp,
                              const ObservationConfig& cfg);

struct MaskConfig {
  double p_mask = 0.3;  // P(m = 0): opponent block replaced by the fill
  ObservationConfig fill;
};

// m = 1 keeps the observation; m = 0 swaps in the fill block. Ego features
// are never touched.
Observation mask_opponent(const Observation& obs, bool m, const MaskConfig& cfg);

}  // namespace arbsim
