#include <doctest.h>

#include "arbsim/geometry.hpp"
#include "arbsim/rng.hpp"

using namespace arbsim;

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(2 * kPi + 0.25) == doctest::Approx(0.25));
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(-50.0, 50.0);
    const double w = wrap_angle(a);
    CHECK(w > -kPi);
    CHECK(w <= kPi + 1e-15);
    // same direction
    CHECK(std::cos(w) == doctest::Approx(std::cos(a)).epsilon(1e-9));
    CHECK(std::sin(w) == doctest::Approx(std::sin(a)).epsilon(1e-9));
  }
}

TEST_CASE("frame transforms round-trip") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const Vec2 p{rng.uniform(-10, 10), rng.uniform(-10, 10)};
    const Vec2 f{rng.uniform(-10, 10), rng.uniform(-10, 10)};
    const double h = rng.uniform(-kPi, kPi);
    const Vec2 back = from_frame(to_frame(p, f, h), f, h);
    CHECK(back.x == doctest::Approx(p.x).epsilon(1e-12));
    CHECK(back.y == doctest::Approx(p.y).epsilon(1e-12));
  }
}

TEST_CASE("rng uniform stays in range and is reproducible") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const double x = a.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(x == b.uniform());
  }
}

TEST_CASE("rng normal moments") {
  Rng rng(123);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal(0.0, 1.0);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}
