#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arbsim/geometry.hpp"

namespace arbsim {

// Occupancy-grid track. Cell (cx, cy) covers the square with lower-left world
// corner origin + (cx, cy) * resolution; out-of-grid queries read as occupied,
// so any well-formed track is closed.
struct Track {
  int width = 0;
  int height = 0;
  double resolution = 0.05;  // meters per cell
  Vec2 origin;               // world coords of cell (0,0) lower-left corner
  std::vector<uint8_t> cells;  // row-major, 1 = occupied

  bool occupied(int cx, int cy) const {
    if (cx < 0 || cy < 0 || cx >= width || cy >= height) return true;
    return cells[static_cast<std::size_t>(cy) * width + cx] != 0;
  }

  bool occupied_at(const Vec2& p) const {
    const int cx = static_cast<int>(std::floor((p.x - origin.x) / resolution));
    const int cy = static_cast<int>(std::floor((p.y - origin.y) / resolution));
    return occupied(cx, cy);
  }

  // disk vs grid overlap, sampled on the cells covered by the disk's bounding box
  bool disk_hits_wall(const Vec2& c, double radius) const;

  void save(const std::string& path) const;
  static Track load(const std::string& path);
};

}  // namespace arbsim
