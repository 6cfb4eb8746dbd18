#include "arbsim/mpc.hpp"

#include <limits>

#include "arbsim/bicycle.hpp"
#include "arbsim/kernels.hpp"

namespace arbsim {

std::vector<double> generate_candidates(bool interaction_mode, double center,
                                        const SamplingMpcConfig& cfg,
                                        const VehicleParams& params) {
  const int m = interaction_mode ? cfg.m_interaction : cfg.m_standard;
  const double span = interaction_mode ? cfg.span_interaction : cfg.span_standard;
  std::vector<double> out(m);
  for (int i = 0; i < m; ++i) {
    const double frac = m > 1 ? static_cast<double>(i) / (m - 1) : 0.5;
    out[i] = clamp(center - span + 2.0 * span * frac, params.steer_min, params.steer_max);
  }
  return out;
}

CandidateTrajectory rollout(const VehicleState& state, double steering, double speed,
                            const SamplingMpcConfig& cfg, const VehicleParams& params) {
  VehicleParams instant = params;
  instant.steer_tau = 0.0;
  instant.speed_tau = 0.0;
  CandidateTrajectory traj;
  traj.steering = steering;
  traj.speed = speed;
  traj.points.reserve(cfg.horizon + 1);
  VehicleState s = state;
  s.speed = speed;
  s.steering = steering;
  traj.points.push_back(s.pos());
  const AckermannCommand cmd{steering, speed};
  for (int k = 0; k < cfg.horizon; ++k) {
    s = step_bicycle(s, cmd, instant, cfg.dt);
    traj.points.push_back(s.pos());
  }
  return traj;
}

FreeDirection free_space_center(const LidarScan& scan, double ref_center, int side,
                                const VehicleParams& params) {
  // freest direction within the steerable sector of the smoothed scan; ties
  // resolve toward the reference-aligned center
  std::vector<double> smooth(scan.ranges.size());
  kernels::box_smooth(scan.ranges, smooth, 2);
  const double a_lo = side > 0 ? 0.0 : -kPi / 3;
  const double a_hi = side < 0 ? 0.0 : kPi / 3;
  const auto [lo, hi] = scan.cone_indices(a_lo, a_hi);
  int best = -1;
  for (int i = lo; i <= hi; ++i) {
    if (best < 0 || smooth[i] > smooth[best] ||
        (smooth[i] == smooth[best] &&
         std::abs(scan.angle_of(i) - ref_center) < std::abs(scan.angle_of(best) - ref_center)))
      best = i;
  }
  if (best < 0) return {ref_center, scan.meta.range_max};
  return {clamp(scan.angle_of(best), params.steer_min, params.steer_max), smooth[best]};
}

std::vector<Vec2> scan_to_points(const LidarScan& scan, const VehicleState& ego, double eps) {
  std::vector<Vec2> pts;
  pts.reserve(scan.ranges.size());
  for (int i = 0; i < scan.beam_count(); ++i) {
    const double r = scan.ranges[i];
    if (r >= scan.meta.range_max - eps) continue;  // no return on this beam
    const double a = ego.heading + scan.angle_of(i);
    pts.push_back({ego.x + r * std::cos(a), ego.y + r * std::sin(a)});
  }
  return pts;
}

void screen_clearance(CandidateTrajectory& traj, const std::vector<Vec2>& scan_points,
                      const SamplingMpcConfig& cfg) {
  if (scan_points.empty()) {
    traj.c_min = std::numeric_limits<double>::infinity();
    traj.feasible = true;
    return;
  }
  std::vector<double> ax(traj.points.size()), ay(traj.points.size());
  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    ax[i] = traj.points[i].x;
    ay[i] = traj.points[i].y;
  }
  std::vector<double> bx(scan_points.size()), by(scan_points.size());
  for (std::size_t i = 0; i < scan_points.size(); ++i) {
    bx[i] = scan_points[i].x;
    by[i] = scan_points[i].y;
  }
  traj.c_min = std::sqrt(kernels::min_pairwise_dist2(ax, ay, bx, by));
  traj.feasible = traj.c_min >= cfg.r_safe;
}

double candidate_cost(const CandidateTrajectory& traj, const Raceline& line, double s0,
                      const SamplingMpcConfig& cfg, bool interaction_mode) {
  if (!traj.feasible) return cfg.j_penalty;
  const double w_trk = interaction_mode ? cfg.w_trk_interaction : cfg.w_trk_standard;
  const double w_delta = interaction_mode ? cfg.w_delta_interaction : cfg.w_delta_standard;
  const double w_prog = interaction_mode ? cfg.w_prog_interaction : cfg.w_prog_standard;
  const double w_obs = interaction_mode ? cfg.w_obs_interaction : cfg.w_obs_standard;

  double trk = 0.0;
  for (std::size_t k = 0; k < traj.points.size(); ++k) {
    const Vec2 ref = line.point_at(s0 + static_cast<double>(k) * traj.speed * cfg.dt);
    trk += (traj.points[k] - ref).norm2();
  }
  const double prog =
      wrap_s_diff(line.nearest_arclength(traj.points.back()) - s0, line.total_length());
  const double phi_base = cfg.phi_onset - traj.c_min;
  const double phi = phi_base > 0.0 ? phi_base * phi_base : 0.0;
  return w_trk * trk + w_delta * traj.steering * traj.steering - w_prog * prog + w_obs * phi;
}

void SamplingMpc::reset() {
  detector_.reset();
  side_latch_ = 0;
}

AckermannCommand SamplingMpc::step(const MessageBus& bus, const Raceline& line, double now,
                                   MpcDiag* diag) {
  (void)now;
  const VehicleState* ego = bus.latest_as<VehicleState>(topics::kEgoOdom);
  const LidarScan* scan = bus.latest_as<LidarScan>(topics::kScanImpaired);
  const VehicleState* opp = bus.latest_as<VehicleState>(topics::kOppOdom);
  if (!ego || !scan) return {0.0, 0.0};

  // mode detection on the same evidence the arbiter uses
  const double d_front =
      front_clearance_percentile(*scan, obs_cfg_.front_cone, obs_cfg_.front_percentile);
  const double d_opp = opp ? (opp->pos() - ego->pos()).norm() : obs_cfg_.fill_d_opp;
  const bool interaction = detector_.update(d_front, d_opp, cfg_.interaction);

  const double s0 = line.nearest_arclength(ego->pos());
  // standard tracking: center aligned with the reference heading; interaction:
  // center biased toward the freest forward direction on a side latched at
  // activation, so the avoidance maneuver commits instead of dithering
  const double ref_center =
      clamp(wrap_angle(line.tangent_heading_at(s0) - ego->heading), params_.steer_min,
            params_.steer_max);
  double center = ref_center;
  double free_range = scan->meta.range_max;
  if (interaction) {
    if (side_latch_ == 0) {
      const FreeDirection probe = free_space_center(*scan, ref_center, 0, params_);
      side_latch_ = probe.steering >= 0.0 ? 1 : -1;
    }
    const FreeDirection dir = free_space_center(*scan, ref_center, side_latch_, params_);
    center = dir.steering;
    free_range = dir.range;
  } else {
    side_latch_ = 0;
  }

  // reference-profile speed during standard tracking; during interaction the
  // speed follows the room along the chosen free direction
  const double ref_speed = line.speed_at(s0);
  std::vector<double> speeds;
  if (interaction)
    speeds.push_back(
        clamp(free_range - cfg_.r_safe, cfg_.speed_floor_interaction, ref_speed));
  else
    speeds.push_back(ref_speed);

  const std::vector<double> deltas = generate_candidates(interaction, center, cfg_, params_);
  const std::vector<Vec2> scan_points = scan_to_points(*scan, *ego, cfg_.scan_point_eps);

  int best = -1;
  double best_cost = std::numeric_limits<double>::infinity();
  double best_center_dist = std::numeric_limits<double>::infinity();
  std::vector<CandidateTrajectory> all;
  all.reserve(deltas.size() * speeds.size());
  bool any_feasible = false;
  for (double speed : speeds) {
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      CandidateTrajectory traj = rollout(*ego, deltas[i], speed, cfg_, params_);
      screen_clearance(traj, scan_points, cfg_);
      traj.cost = candidate_cost(traj, line, s0, cfg_, interaction);
      any_feasible = any_feasible || traj.feasible;
      const double center_dist = std::abs(traj.steering - center);
      if (traj.cost < best_cost ||
          (traj.cost == best_cost && center_dist < best_center_dist)) {
        best_cost = traj.cost;
        best_center_dist = center_dist;
        best = static_cast<int>(all.size());
      }
      all.push_back(std::move(traj));
    }
  }

  if (diag) {
    diag->interaction = interaction;
    diag->center = center;
    diag->candidates = all;
    diag->selected = any_feasible ? best : -1;
  }
  if (!any_feasible) return {0.0, 0.0};
  return saturate({all[best].steering, all[best].speed}, params_);
}

}  // namespace arbsim
