#include "arbsim/observation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace arbsim {

bool Observation::finite() const {
  for (double x : to_array())
    if (!std::isfinite(x)) return false;
  return true;
}

double front_clearance_percentile(const LidarScan& scan, double cone, double percentile) {
  const auto [lo, hi] = scan.cone_indices(-cone / 2, cone / 2);
  std::vector<double> beams(scan.ranges.begin() + lo, scan.ranges.begin() + hi + 1);
  const std::size_t rank =
      static_cast<std::size_t>(percentile * static_cast<double>(beams.size() - 1));
  std::nth_element(beams.begin(), beams.begin() + rank, beams.end());
  return beams[rank];
}

double front_clearance_min(const LidarScan& scan, double cone) {
  const auto [lo, hi] = scan.cone_indices(-cone / 2, cone / 2);
  double best = scan.ranges[lo];
  for (int i = lo + 1; i <= hi; ++i) best = std::min(best, scan.ranges[i]);
  return best;
}

Observation build_observation(const VehicleState& ego, const Raceline& line,
                              const LidarScan& scan, const VehicleState* opp,
                              const ObservationConfig& cfg) {
  Observation obs;
  obs.v = ego.speed;

  const double s0 = line.nearest_arclength(ego.pos());
  obs.kappa0 = line.curvature_at(s0);
  obs.kappa1 = line.curvature_at(s0 + cfg.curv_s1);
  obs.kappa2 = line.curvature_at(s0 + cfg.curv_s2);
  obs.dkappa = std::max({obs.kappa0, obs.kappa1, obs.kappa2}) -
               std::min({obs.kappa0, obs.kappa1, obs.kappa2});

  obs.d_front = front_clearance_percentile(scan, cfg.front_cone, cfg.front_percentile);

  if (opp) {
    const Vec2 rel = to_frame(opp->pos(), ego.pos(), ego.heading);
    obs.d_opp = rel.norm();
    const double beta = std::atan2(rel.y, rel.x);
    obs.sin_beta = std::sin(beta);
    obs.cos_beta = std::cos(beta);
    obs.dv = ego.speed - opp->speed;
  } else {
    obs.d_opp = cfg.fill_d_opp;
    obs.sin_beta = cfg.fill_sin_beta;
    obs.cos_beta = cfg.fill_cos_beta;
    obs.dv = cfg.fill_dv;
  }
  return obs;
}

Observation mask_opponent(const Observation& obs, bool m, const MaskConfig& cfg) {
  if (m) return obs;
  Observation out = obs;
  out.d_opp = cfg.fill.fill_d_opp;
  out.sin_beta = cfg.fill.fill_sin_beta;
  out.cos_beta = cfg.fill.fill_cos_beta;
  out.dv = cfg.fill.fill_dv;
  return out;
}

}  // namespace arbsim
