#pragma once

#include <cmath>

namespace arbsim {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }

  // rotate by angle (counterclockwise)
  Vec2 rotated(double a) const {
    const double c = std::cos(a), s = std::sin(a);
    return {c * x - s * y, s * x + c * y};
  }
};

inline double deg2rad(double d) { return d * kPi / 180.0; }

// normalize to (-pi, pi]
inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

inline double clamp(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

// world point expressed in the frame of a pose (position + heading)
inline Vec2 to_frame(const Vec2& p, const Vec2& frame_pos, double frame_heading) {
  return (p - frame_pos).rotated(-frame_heading);
}

inline Vec2 from_frame(const Vec2& p, const Vec2& frame_pos, double frame_heading) {
  return frame_pos + p.rotated(frame_heading);
}

}  // namespace arbsim
