#pragma once

#include <string>
#include <vector>

#include "arbsim/geometry.hpp"

namespace arbsim {

struct RacelineWaypoint {
  Vec2 p;
  double speed = 0.0;  // reference speed, m/s
};

// Reference path with per-waypoint target speeds and a cumulative arclength
// table. Arclength s runs along the polyline; closed lines wrap modulo length.
struct Raceline {
  std::vector<RacelineWaypoint> wp;
  bool closed = true;
  std::vector<double> arclen;  // arclen[i] = distance from wp[0] to wp[i]

  void finalize();  // builds arclength table, validates invariants
  double total_length() const;

  double wrap_s(double s) const;
  Vec2 point_at(double s) const;
  double tangent_heading_at(double s) const;
  double speed_at(double s) const;

  // signed curvature from the circumscribed circle through points at
  // s - h, s, s + h (positive = left turn)
  double curvature_at(double s, double h = 0.5) const;

  // arclength of the closest point on the polyline
  double nearest_arclength(const Vec2& p) const;

  void save_csv(const std::string& path) const;
  static Raceline load_csv(const std::string& path);
};

// Continuous progress along a raceline: accumulates signed arclength deltas
// across lap wraps, searching near the previous match so that measurement
// noise cannot teleport the projection to the far side of the track.
class RacelineTracker {
 public:
  explicit RacelineTracker(const Raceline& line) : line_(&line) {}

  void reset(const Vec2& p);
  double update(const Vec2& p);  // returns continuous arclength
  double progress() const { return s_continuous_; }

 private:
  const Raceline* line_;
  double s_continuous_ = 0.0;
  double s_wrapped_ = 0.0;
  bool initialized_ = false;
};

// signed wrap of an arclength difference into (-L/2, L/2]
double wrap_s_diff(double ds, double total_length);

}  // namespace arbsim
