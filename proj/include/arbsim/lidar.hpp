#pragma once

#include <span>

#include "arbsim/track.hpp"
#include "arbsim/types.hpp"

namespace arbsim {

// Distance along a ray to the first occupied cell boundary (Amanatides-Woo
// traversal), capped at max_range. The start cell must be free.
double raycast_grid(const Track& track, const Vec2& origin, double angle, double max_range);

// Distance along a ray to a disk; +inf if the ray misses or the disk is behind.
double raycast_disk(const Vec2& origin, double angle, const ObstacleDisk& disk);

// Simulated planar LiDAR: per-beam nearest hit against the grid and the given
// disks, clipped to [range_min, range_max]. Throws EgoOutOfBounds if the ego
// position lies in an occupied cell.
LidarScan simulate_lidar(const VehicleState& ego, const Track& track,
                         std::span<const ObstacleDisk> others, const LidarMeta& meta,
                         double stamp);

}  // namespace arbsim
