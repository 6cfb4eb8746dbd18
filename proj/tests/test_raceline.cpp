#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "arbsim/raceline.hpp"
#include "arbsim/rng.hpp"
#include "arbsim/synthetic_tracks.hpp"

using namespace arbsim;

namespace {

Raceline circle_line(double radius, int n = 120, double speed = 3.0) {
  Raceline line;
  line.closed = true;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * kPi * i / n;
    line.wp.push_back({{radius * std::cos(a), radius * std::sin(a)}, speed});
  }
  line.finalize();
  return line;
}

Raceline straight_line(double len = 40.0, int n = 80, double speed = 4.0) {
  Raceline line;
  line.closed = false;
  for (int i = 0; i < n; ++i) line.wp.push_back({{len * i / (n - 1), 0.0}, speed});
  line.finalize();
  return line;
}

}  // namespace

TEST_CASE("arclength table is strictly increasing") {
  const Raceline line = circle_line(5.0);
  for (std::size_t i = 1; i < line.arclen.size(); ++i) CHECK(line.arclen[i] > line.arclen[i - 1]);
  CHECK(line.total_length() == doctest::Approx(2 * kPi * 5.0).epsilon(1e-3));
}

TEST_CASE("curvature of a straight line is zero") {
  const Raceline line = straight_line();
  CHECK(line.curvature_at(5.0) == doctest::Approx(0.0));
  CHECK(line.curvature_at(20.0) == doctest::Approx(0.0));
}

TEST_CASE("curvature of a circle matches 1/R within 2 percent") {
  // analytic circle curvature vs the three-point circumcircle formula
  const Raceline line = circle_line(5.0);
  for (double s = 0.0; s < line.total_length(); s += 2.3) {
    CHECK(line.curvature_at(s) == doctest::Approx(0.2).epsilon(0.02));
  }
  // clockwise circle flips the sign
  Raceline cw;
  cw.closed = true;
  for (int i = 0; i < 120; ++i) {
    const double a = -2.0 * kPi * i / 120;
    cw.wp.push_back({{5.0 * std::cos(a), 5.0 * std::sin(a)}, 3.0});
  }
  cw.finalize();
  CHECK(cw.curvature_at(3.0) == doctest::Approx(-0.2).epsilon(0.02));
}

TEST_CASE("nearest_arclength projects onto the polyline") {
  const Raceline line = straight_line();
  CHECK(line.nearest_arclength({10.0, 2.0}) == doctest::Approx(10.0).epsilon(1e-6));
  CHECK(line.nearest_arclength({-5.0, 1.0}) == doctest::Approx(0.0));
}

TEST_CASE("point_at wraps on closed lines") {
  const Raceline line = circle_line(5.0);
  const double L = line.total_length();
  const Vec2 a = line.point_at(1.0);
  const Vec2 b = line.point_at(1.0 + L);
  CHECK(a.x == doctest::Approx(b.x).epsilon(1e-9));
  CHECK(a.y == doctest::Approx(b.y).epsilon(1e-9));
}

TEST_CASE("tracker accumulates continuous progress across the wrap") {
  const Raceline line = circle_line(5.0);
  RacelineTracker tracker(line);
  const double L = line.total_length();
  double s = 0.0;
  tracker.reset(line.point_at(0.0));
  for (int lap = 0; lap < 2; ++lap) {
    for (double ds = 0.4; s < (lap + 1) * L; s += ds) {
      tracker.update(line.point_at(s));
    }
  }
  CHECK(tracker.progress() == doctest::Approx(s - 0.4).epsilon(0.01));
  CHECK(tracker.progress() > L);  // crossed the seam without losing a lap
}

TEST_CASE("wrap_s_diff is antisymmetric near the seam") {
  CHECK(wrap_s_diff(0.5, 60.0) == doctest::Approx(0.5));
  CHECK(wrap_s_diff(59.5 - 0.0, 60.0) == doctest::Approx(-0.5));
  CHECK(wrap_s_diff(-59.5, 60.0) == doctest::Approx(0.5));
}

TEST_CASE("csv round-trip preserves waypoints and closed flag") {
  const Raceline line = circle_line(5.0, 40);
  const std::string path = std::filesystem::temp_directory_path() / "arbsim_rl_test.csv";
  line.save_csv(path);
  const Raceline back = Raceline::load_csv(path);
  REQUIRE(back.wp.size() == line.wp.size());
  CHECK(back.closed == line.closed);
  for (std::size_t i = 0; i < line.wp.size(); ++i) {
    CHECK(back.wp[i].p.x == line.wp[i].p.x);
    CHECK(back.wp[i].p.y == line.wp[i].p.y);
    CHECK(back.wp[i].speed == line.wp[i].speed);
  }
  std::filesystem::remove(path);
}

TEST_CASE("synthetic tracks close and keep the raceline in free space") {
  for (const char* name : {"oval", "chicane"}) {
    const SyntheticTrack st = make_track_by_name(name, 0.05);
    const double L = st.raceline.total_length();
    CHECK(L > 30.0);
    // every waypoint must sit in free cells with clearance for the vehicle
    for (const auto& w : st.raceline.wp) {
      CHECK(!st.track.occupied_at(w.p));
      CHECK(!st.track.disk_hits_wall(w.p, 0.25));
      CHECK(w.speed > 0.5);
      CHECK(w.speed <= 4.0);
    }
    // seam continuity: first and last waypoints are one spacing apart
    const double seam = (st.raceline.wp.front().p - st.raceline.wp.back().p).norm();
    CHECK(seam < 0.6);
  }
}
