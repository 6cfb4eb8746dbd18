#include "arbsim/controllers.hpp"

#include <vector>

#include "arbsim/kernels.hpp"

namespace arbsim {

double pure_pursuit_curvature(const Vec2& local_target) {
  const double d2 = local_target.norm2();
  if (d2 < 1e-9) return 0.0;  // degenerate lookahead, hold course
  return 2.0 * local_target.y / d2;
}

double pure_pursuit_steering(const Vec2& local_target, double wheelbase) {
  return std::atan(wheelbase * pure_pursuit_curvature(local_target));
}

AckermannCommand pure_pursuit(const VehicleState& ego, const Raceline& line,
                              const PurePursuitConfig& cfg, const VehicleParams& params) {
  const double s0 = line.nearest_arclength(ego.pos());
  const double ld = clamp(cfg.lookahead_base + cfg.lookahead_gain * ego.speed,
                          cfg.lookahead_min, cfg.lookahead_max);
  const double s_target = s0 + ld;
  const Vec2 target = line.point_at(s_target);
  const Vec2 local = to_frame(target, ego.pos(), ego.heading);

  AckermannCommand cmd;
  cmd.steering = pure_pursuit_steering(local, params.wheelbase);
  cmd.speed = line.speed_at(s_target);
  return saturate(cmd, params);
}

GapFollowResult gap_follow(const LidarScan& scan, const GapFollowConfig& cfg,
                           const VehicleParams& params) {
  const int n = scan.beam_count();
  std::vector<double> proc(scan.ranges);
  kernels::clamp_ranges(proc, scan.meta.range_min, cfg.max_considered_range);
  std::vector<double> smooth(n);
  kernels::box_smooth(proc, smooth, cfg.smooth_window / 2);

  // forward clearance decides the speed tier; taken before bubble removal
  const auto [flo, fhi] = scan.cone_indices(-cfg.forward_sector / 2, cfg.forward_sector / 2);
  const double forward_clear =
      kernels::min_value(std::span<const double>(smooth).subspan(flo, fhi - flo + 1));

  // safety bubble around the nearest return
  const std::size_t nearest = kernels::min_index(smooth);
  const double nearest_range = smooth[nearest];
  const double half_angle =
      nearest_range > cfg.bubble_radius
          ? std::asin(cfg.bubble_radius / nearest_range)
          : kPi / 2.0;
  const int bubble_beams = static_cast<int>(std::ceil(half_angle / scan.meta.angle_step()));
  const int blo = static_cast<int>(nearest) - bubble_beams;
  const int bhi = static_cast<int>(nearest) + bubble_beams;
  for (int i = blo < 0 ? 0 : blo; i <= bhi && i < n; ++i) smooth[i] = 0.0;

  // widest run of surviving beams inside the usable fov
  const auto [glo, ghi] = scan.cone_indices(-cfg.fov_used / 2, cfg.fov_used / 2);
  int best_start = -1, best_len = 0;
  double best_center_off = 0.0;
  const double mid_beam = 0.5 * (scan.meta.beam_count - 1);
  int run_start = -1;
  for (int i = glo; i <= ghi + 1; ++i) {
    const bool open = i <= ghi && smooth[i] > 0.0;
    if (open && run_start < 0) run_start = i;
    if (!open && run_start >= 0) {
      const int len = i - run_start;
      const double center_off = std::abs(0.5 * (run_start + i - 1) - mid_beam);
      if (len > best_len || (len == best_len && center_off < best_center_off)) {
        best_len = len;
        best_start = run_start;
        best_center_off = center_off;
      }
      run_start = -1;
    }
  }

  GapFollowResult res;
  if (best_len == 0) {
    res.no_gap = true;
    res.cmd = {0.0, 0.0};
    return res;
  }

  // farthest beam in the run; ties resolve toward the run center
  const int run_end = best_start + best_len - 1;
  const double run_center = 0.5 * (best_start + run_end);
  int target = best_start;
  for (int i = best_start; i <= run_end; ++i) {
    if (smooth[i] > smooth[target] ||
        (smooth[i] == smooth[target] &&
         std::abs(i - run_center) < std::abs(target - run_center)))
      target = i;
  }
  res.target_beam = target;
  res.cmd.steering = scan.angle_of(target);
  if (forward_clear >= cfg.clear_fast) res.cmd.speed = cfg.speed_fast;
  else if (forward_clear >= cfg.clear_mid) res.cmd.speed = cfg.speed_mid;
  else res.cmd.speed = cfg.speed_slow;
  res.cmd = saturate(res.cmd, params);
  return res;
}

}  // namespace arbsim
