#include "arbsim/synthetic_tracks.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <vector>

#include "arbsim/errors.hpp"

namespace arbsim {

namespace {

struct Turtle {
  Vec2 p;
  double heading = 0.0;
  std::vector<Vec2> samples;
  double spacing = 0.25;
  double residual = 0.0;  // distance carried into the next segment

  void emit(const Vec2& q) { samples.push_back(q); }

  void straight(double len) {
    const Vec2 d{std::cos(heading), std::sin(heading)};
    double s = spacing - residual;
    while (s < len) {
      emit(p + d * s);
      s += spacing;
    }
    residual = len - (s - spacing);
    p = p + d * len;
  }

  // sweep > 0 turns left, < 0 right
  void arc(double radius, double sweep) {
    const double side = sweep > 0 ? 1.0 : -1.0;
    const Vec2 center{p.x - side * radius * std::sin(heading),
                      p.y + side * radius * std::cos(heading)};
    const double len = radius * std::abs(sweep);
    double s = spacing - residual;
    while (s < len) {
      const double h = heading + side * s / radius;
      emit({center.x + side * radius * std::sin(h), center.y - side * radius * std::cos(h)});
      s += spacing;
    }
    residual = len - (s - spacing);
    heading = wrap_angle(heading + sweep);
    p = {center.x + side * radius * std::sin(heading),
         center.y - side * radius * std::cos(heading)};
  }
};

// minimum distance from a point to the closed centerline polyline
double dist_to_polyline(const Vec2& q, const std::vector<Vec2>& pts) {
  double best2 = std::numeric_limits<double>::infinity();
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = pts[i];
    const Vec2 b = pts[(i + 1) % n];
    const Vec2 ab = b - a;
    const double len2 = ab.norm2();
    const double t = len2 > 0 ? clamp((q - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const Vec2 c = a + ab * t;
    const double d2 = (q - c).norm2();
    if (d2 < best2) best2 = d2;
  }
  return std::sqrt(best2);
}

// curvature-limited speed profile with longitudinal accel/decel smoothing
std::vector<double> speed_profile(const std::vector<Vec2>& pts, double v_max,
                                  double a_lat, double a_lon) {
  const std::size_t n = pts.size();
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = pts[(i + n - 1) % n], b = pts[i], c = pts[(i + 1) % n];
    const Vec2 ab = b - a, bc = c - b, ac = c - a;
    const double denom = ab.norm() * bc.norm() * ac.norm();
    const double kappa = denom > 1e-12 ? std::abs(2.0 * ab.cross(bc) / denom) : 0.0;
    v[i] = kappa > 1e-6 ? std::min(v_max, std::sqrt(a_lat / kappa)) : v_max;
  }
  // two wrap-around passes each way so limits propagate across the seam
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t k = 2 * n; k-- > 0;) {  // backward: braking ahead of corners
      const std::size_t i = k % n;
      const std::size_t j = (i + 1) % n;
      const double ds = (pts[j] - pts[i]).norm();
      v[i] = std::min(v[i], std::sqrt(v[j] * v[j] + 2.0 * a_lon * ds));
    }
    for (std::size_t k = 0; k < 2 * n; ++k) {  // forward: acceleration limit
      const std::size_t i = k % n;
      const std::size_t j = (i + 1) % n;
      const double ds = (pts[j] - pts[i]).norm();
      v[j] = std::min(v[j], std::sqrt(v[i] * v[i] + 2.0 * a_lon * ds));
    }
  }
  return v;
}

SyntheticTrack build(const std::string& name, const std::vector<Vec2>& center,
                     double half_width, double resolution, double v_max) {
  SyntheticTrack out;
  out.name = name;

  Vec2 lo{1e18, 1e18}, hi{-1e18, -1e18};
  for (const Vec2& q : center) {
    lo.x = std::min(lo.x, q.x);
    lo.y = std::min(lo.y, q.y);
    hi.x = std::max(hi.x, q.x);
    hi.y = std::max(hi.y, q.y);
  }
  const double margin = half_width + 0.6;
  Track& t = out.track;
  t.resolution = resolution;
  t.origin = {lo.x - margin, lo.y - margin};
  t.width = static_cast<int>(std::ceil((hi.x - lo.x + 2 * margin) / resolution));
  t.height = static_cast<int>(std::ceil((hi.y - lo.y + 2 * margin) / resolution));
  t.cells.assign(static_cast<std::size_t>(t.width) * t.height, 1);
  for (int cy = 0; cy < t.height; ++cy) {
    for (int cx = 0; cx < t.width; ++cx) {
      const Vec2 q{t.origin.x + (cx + 0.5) * resolution, t.origin.y + (cy + 0.5) * resolution};
      if (dist_to_polyline(q, center) <= half_width)
        t.cells[static_cast<std::size_t>(cy) * t.width + cx] = 0;
    }
  }

  const std::vector<double> v = speed_profile(center, v_max, 3.0, 2.0);
  out.raceline.closed = true;
  out.raceline.wp.resize(center.size());
  for (std::size_t i = 0; i < center.size(); ++i)
    out.raceline.wp[i] = {center[i], v[i]};
  out.raceline.finalize();
  return out;
}

}  // namespace

SyntheticTrack make_oval_track(double resolution) {
  Turtle tt;
  tt.p = {-9.0, -4.5};
  tt.heading = 0.0;
  tt.emit(tt.p);
  tt.straight(18.0);
  tt.arc(4.5, kPi);
  tt.straight(18.0);
  tt.arc(4.5, kPi);
  assert((tt.p - Vec2{-9.0, -4.5}).norm() < 1e-9);
  return build("oval", tt.samples, 2.2, resolution, 4.0);
}

SyntheticTrack make_chicane_track(double resolution) {
  Turtle tt;
  const double r = 3.0;
  const double s60 = kPi / 3.0;
  tt.p = {0.0, 0.0};
  tt.heading = 0.0;
  tt.emit(tt.p);
  tt.straight(3.0);
  tt.arc(r, s60);
  tt.arc(r, -s60);
  tt.arc(r, -s60);
  tt.arc(r, s60);
  tt.straight(3.0);
  const double bottom_dx = tt.p.x;  // top straight must match for closure
  tt.arc(4.0, kPi);
  tt.straight(bottom_dx);
  tt.arc(4.0, kPi);
  assert(tt.p.norm() < 1e-9);
  return build("chicane", tt.samples, 1.5, resolution, 4.0);
}

SyntheticTrack make_track_by_name(const std::string& name, double resolution) {
  if (name == "oval") return make_oval_track(resolution);
  if (name == "chicane") return make_chicane_track(resolution);
  throw ConfigError("unknown synthetic track '" + name + "'");
}

}  // namespace arbsim
