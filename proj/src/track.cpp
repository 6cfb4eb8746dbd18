#include "arbsim/track.hpp"

#include <fstream>
#include <sstream>

#include "arbsim/errors.hpp"

namespace arbsim {

bool Track::disk_hits_wall(const Vec2& c, double radius) const {
  const int cx0 = static_cast<int>(std::floor((c.x - radius - origin.x) / resolution));
  const int cx1 = static_cast<int>(std::floor((c.x + radius - origin.x) / resolution));
  const int cy0 = static_cast<int>(std::floor((c.y - radius - origin.y) / resolution));
  const int cy1 = static_cast<int>(std::floor((c.y + radius - origin.y) / resolution));
  const double r2 = radius * radius;
  for (int cy = cy0; cy <= cy1; ++cy) {
    for (int cx = cx0; cx <= cx1; ++cx) {
      if (!occupied(cx, cy)) continue;
      // closest point of the cell rectangle to the disk center
      const double x0 = origin.x + cx * resolution;
      const double y0 = origin.y + cy * resolution;
      const double px = clamp(c.x, x0, x0 + resolution);
      const double py = clamp(c.y, y0, y0 + resolution);
      const double dx = c.x - px, dy = c.y - py;
      if (dx * dx + dy * dy <= r2) return true;
    }
  }
  return false;
}

void Track::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write track file: " + path);
  f << "# arbsim track v1\n";
  f << "resolution " << resolution << "\n";
  f << "origin " << origin.x << " " << origin.y << "\n";
  f << "width " << width << "\n";
  f << "height " << height << "\n";
  f << "grid\n";
  for (int cy = 0; cy < height; ++cy) {
    for (int cx = 0; cx < width; ++cx)
      f << (cells[static_cast<std::size_t>(cy) * width + cx] ? '1' : '0');
    f << "\n";
  }
}

Track Track::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open track file: " + path);
  Track t;
  std::string line;
  bool in_grid = false;
  int row = 0;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!in_grid) {
      std::istringstream ss(line);
      std::string key;
      ss >> key;
      if (key == "resolution") ss >> t.resolution;
      else if (key == "origin") ss >> t.origin.x >> t.origin.y;
      else if (key == "width") ss >> t.width;
      else if (key == "height") ss >> t.height;
      else if (key == "grid") {
        if (t.width <= 0 || t.height <= 0 || t.resolution <= 0)
          throw ConfigError("track header incomplete in " + path);
        t.cells.assign(static_cast<std::size_t>(t.width) * t.height, 1);
        in_grid = true;
      } else {
        throw ConfigError("unknown track header key '" + key + "' in " + path);
      }
    } else {
      if (row >= t.height) throw ConfigError("too many grid rows in " + path);
      if (static_cast<int>(line.size()) < t.width)
        throw ConfigError("short grid row in " + path);
      for (int cx = 0; cx < t.width; ++cx)
        t.cells[static_cast<std::size_t>(row) * t.width + cx] = line[cx] == '1' ? 1 : 0;
      ++row;
    }
  }
  if (!in_grid || row != t.height) throw ConfigError("truncated grid in " + path);
  return t;
}

}  // namespace arbsim
