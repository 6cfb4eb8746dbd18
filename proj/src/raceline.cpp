#include "arbsim/raceline.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "arbsim/errors.hpp"

namespace arbsim {

void Raceline::finalize() {
  if (wp.size() < 3) throw ConfigError("raceline needs >= 3 waypoints");
  arclen.resize(wp.size());
  arclen[0] = 0.0;
  for (std::size_t i = 1; i < wp.size(); ++i) {
    const double d = (wp[i].p - wp[i - 1].p).norm();
    if (d <= 1e-12) throw ConfigError("raceline has duplicate consecutive waypoints");
    arclen[i] = arclen[i - 1] + d;
  }
  if (closed) {
    const double d = (wp.front().p - wp.back().p).norm();
    if (d <= 1e-12) throw ConfigError("closed raceline must not repeat the first waypoint");
  }
}

double Raceline::total_length() const {
  double len = arclen.back();
  if (closed) len += (wp.front().p - wp.back().p).norm();
  return len;
}

double Raceline::wrap_s(double s) const {
  if (!closed) return clamp(s, 0.0, arclen.back());
  const double L = total_length();
  s = std::fmod(s, L);
  if (s < 0.0) s += L;
  return s;
}

namespace {

// segment index + local offset for a wrapped arclength
struct SegPos {
  std::size_t i0, i1;
  double t;  // [0,1] along the segment
};

SegPos locate(const Raceline& line, double s) {
  const auto& arclen = line.arclen;
  // last waypoint with arclen <= s; closing segment handled explicitly
  auto it = std::upper_bound(arclen.begin(), arclen.end(), s);
  std::size_t i0 = it == arclen.begin() ? 0 : static_cast<std::size_t>(it - arclen.begin() - 1);
  if (i0 >= line.wp.size() - 1) {
    if (line.closed) {
      const double seg_len = line.total_length() - arclen.back();
      const double t = seg_len > 0 ? (s - arclen.back()) / seg_len : 0.0;
      return {line.wp.size() - 1, 0, clamp(t, 0.0, 1.0)};
    }
    return {line.wp.size() - 2, line.wp.size() - 1, 1.0};
  }
  const double seg_len = arclen[i0 + 1] - arclen[i0];
  return {i0, i0 + 1, clamp((s - arclen[i0]) / seg_len, 0.0, 1.0)};
}

}  // namespace

Vec2 Raceline::point_at(double s) const {
  const SegPos sp = locate(*this, wrap_s(s));
  const Vec2 a = wp[sp.i0].p, b = wp[sp.i1].p;
  return a + (b - a) * sp.t;
}

double Raceline::tangent_heading_at(double s) const {
  const SegPos sp = locate(*this, wrap_s(s));
  const Vec2 d = wp[sp.i1].p - wp[sp.i0].p;
  return std::atan2(d.y, d.x);
}

double Raceline::speed_at(double s) const {
  const SegPos sp = locate(*this, wrap_s(s));
  return wp[sp.i0].speed + (wp[sp.i1].speed - wp[sp.i0].speed) * sp.t;
}

double Raceline::curvature_at(double s, double h) const {
  const Vec2 a = point_at(s - h);
  const Vec2 b = point_at(s);
  const Vec2 c = point_at(s + h);
  const Vec2 ab = b - a, bc = c - b, ac = c - a;
  const double denom = ab.norm() * bc.norm() * ac.norm();
  if (denom < 1e-12) return 0.0;
  return 2.0 * ab.cross(bc) / denom;
}

double Raceline::nearest_arclength(const Vec2& p) const {
  double best_d2 = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  const std::size_t nseg = closed ? wp.size() : wp.size() - 1;
  for (std::size_t i = 0; i < nseg; ++i) {
    const Vec2 a = wp[i].p;
    const Vec2 b = wp[(i + 1) % wp.size()].p;
    const Vec2 ab = b - a;
    const double len2 = ab.norm2();
    double t = len2 > 0 ? clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const Vec2 q = a + ab * t;
    const double d2 = (p - q).norm2();
    if (d2 < best_d2) {
      best_d2 = d2;
      best_s = arclen[i] + t * ab.norm();
    }
  }
  return wrap_s(best_s);
}

void Raceline::save_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write raceline file: " + path);
  f << "# closed: " << (closed ? "true" : "false") << "\n";
  f << "x,y,reference_speed\n";
  f.precision(17);
  for (const auto& w : wp) f << w.p.x << "," << w.p.y << "," << w.speed << "\n";
}

Raceline Raceline::load_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open raceline file: " + path);
  Raceline line;
  std::string row;
  while (std::getline(f, row)) {
    if (row.empty()) continue;
    if (row[0] == '#') {
      if (row.find("closed:") != std::string::npos)
        line.closed = row.find("true") != std::string::npos;
      continue;
    }
    if (row.find("x,") == 0) continue;  // header
    std::istringstream ss(row);
    RacelineWaypoint w;
    char comma;
    if (!(ss >> w.p.x >> comma >> w.p.y >> comma >> w.speed))
      throw ConfigError("bad raceline row '" + row + "' in " + path);
    line.wp.push_back(w);
  }
  line.finalize();
  return line;
}

double wrap_s_diff(double ds, double total_length) {
  ds = std::fmod(ds, total_length);
  if (ds > 0.5 * total_length) ds -= total_length;
  if (ds <= -0.5 * total_length) ds += total_length;
  return ds;
}

void RacelineTracker::reset(const Vec2& p) {
  s_wrapped_ = line_->nearest_arclength(p);
  s_continuous_ = s_wrapped_;
  initialized_ = true;
}

double RacelineTracker::update(const Vec2& p) {
  if (!initialized_) {
    reset(p);
    return s_continuous_;
  }
  const double s_new = line_->nearest_arclength(p);
  const double ds = wrap_s_diff(s_new - s_wrapped_, line_->total_length());
  s_wrapped_ = s_new;
  s_continuous_ += ds;
  return s_continuous_;
}

}  // namespace arbsim
