#include "arbsim/lidar.hpp"

#include <limits>

#include "arbsim/errors.hpp"
#include "arbsim/kernels.hpp"

namespace arbsim {

double raycast_grid(const Track& track, const Vec2& origin, double angle, double max_range) {
  const double res = track.resolution;
  const double dx = std::cos(angle), dy = std::sin(angle);

  int cx = static_cast<int>(std::floor((origin.x - track.origin.x) / res));
  int cy = static_cast<int>(std::floor((origin.y - track.origin.y) / res));
  if (track.occupied(cx, cy)) return 0.0;

  const int step_x = dx > 0 ? 1 : -1;
  const int step_y = dy > 0 ? 1 : -1;
  const double inv_ax = dx != 0.0 ? 1.0 / std::abs(dx) : std::numeric_limits<double>::infinity();
  const double inv_ay = dy != 0.0 ? 1.0 / std::abs(dy) : std::numeric_limits<double>::infinity();
  const double t_delta_x = res * inv_ax;
  const double t_delta_y = res * inv_ay;

  const double fx = (origin.x - track.origin.x) / res - cx;  // [0,1) within cell
  const double fy = (origin.y - track.origin.y) / res - cy;
  double t_max_x = (dx > 0 ? (1.0 - fx) : fx) * res * inv_ax;
  double t_max_y = (dy > 0 ? (1.0 - fy) : fy) * res * inv_ay;

  while (true) {
    double t;
    if (t_max_x < t_max_y) {
      t = t_max_x;
      t_max_x += t_delta_x;
      cx += step_x;
    } else {
      t = t_max_y;
      t_max_y += t_delta_y;
      cy += step_y;
    }
    if (t > max_range) return max_range;
    if (track.occupied(cx, cy)) return t;
  }
}

double raycast_disk(const Vec2& origin, double angle, const ObstacleDisk& disk) {
  const Vec2 d{std::cos(angle), std::sin(angle)};
  const Vec2 oc = origin - disk.center;
  const double b = oc.dot(d);
  const double c = oc.norm2() - disk.radius * disk.radius;
  const double disc = b * b - c;
  if (disc < 0.0) return std::numeric_limits<double>::infinity();
  const double sq = std::sqrt(disc);
  const double t1 = -b - sq;
  if (t1 >= 0.0) return t1;
  const double t2 = -b + sq;
  if (t2 >= 0.0) return 0.0;  // origin inside the disk
  return std::numeric_limits<double>::infinity();
}

LidarScan simulate_lidar(const VehicleState& ego, const Track& track,
                         std::span<const ObstacleDisk> others, const LidarMeta& meta,
                         double stamp) {
  if (track.occupied_at(ego.pos()))
    throw EgoOutOfBounds("lidar origin inside occupied cell");

  LidarScan scan;
  scan.stamp = stamp;
  scan.meta = meta;
  scan.ranges.resize(meta.beam_count);
  const Vec2 origin = ego.pos();
  for (int i = 0; i < meta.beam_count; ++i) {
    const double a = ego.heading + meta.angle_of(i);
    double r = raycast_grid(track, origin, a, meta.range_max);
    for (const auto& disk : others) {
      const double rd = raycast_disk(origin, a, disk);
      if (rd < r) r = rd;
    }
    scan.ranges[i] = r;
  }
  kernels::clamp_ranges(scan.ranges, meta.range_min, meta.range_max);
  return scan;
}

}  // namespace arbsim
