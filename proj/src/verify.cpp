#include "arbsim/verify.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include "arbsim/arbiter.hpp"
#include "arbsim/controllers.hpp"
#include "arbsim/gae.hpp"
#include "arbsim/impairments.hpp"
#include "arbsim/mpc.hpp"
#include "arbsim/rng.hpp"

namespace arbsim {

namespace {

bool verify_pure_pursuit(std::ostream& os) {
  Rng rng(1001);
  bool ok = true;
  for (int i = 0; i < 100 && ok; ++i) {
    Vec2 p{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    if (p.norm() < 1e-3) p.x += 1.0;
    const double kappa = pure_pursuit_curvature(p);
    ok = ok && std::abs(kappa * p.norm2() - 2.0 * p.y) < 1e-9;
    ok = ok && pure_pursuit_steering(p, 0.33) == -pure_pursuit_steering({p.x, -p.y}, 0.33);
  }
  os << (ok ? "[pass]" : "[FAIL]") << " pure-pursuit curvature identity\n";
  return ok;
}

bool verify_fusion(std::ostream& os) {
  Rng rng(1002);
  VehicleParams p;
  bool ok = true;
  for (int i = 0; i < 1000 && ok; ++i) {
    const AckermannCommand a{rng.uniform(-0.4, 0.4), rng.uniform(0, 6)};
    const AckermannCommand b{rng.uniform(-0.4, 0.4), rng.uniform(0, 6)};
    const AckermannCommand lo = fuse(a, b, 0.0, p);
    const AckermannCommand hi = fuse(a, b, 1.0, p);
    ok = ok && lo.steering == a.steering && lo.speed == a.speed;
    ok = ok && hi.steering == b.steering && hi.speed == b.speed;
    const double alpha = rng.uniform();
    const AckermannCommand f = fuse(a, b, alpha, p);
    const double expect_steer = (1 - alpha) * a.steering + alpha * b.steering;
    ok = ok && std::abs(f.steering - clamp(expect_steer, p.steer_min, p.steer_max)) < 1e-15;
  }
  os << (ok ? "[pass]" : "[FAIL]") << " fusion convex combination\n";
  return ok;
}

bool verify_gae(std::ostream& os) {
  Rng rng(1003);
  bool ok = true;
  for (int trial = 0; trial < 50 && ok; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(10);
    std::vector<double> r(n), v(n);
    std::vector<uint8_t> d(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = rng.uniform(-2, 2);
      v[i] = rng.uniform(-2, 2);
      d[i] = rng.uniform() < 0.2 ? 1 : 0;
    }
    const double bootstrap = rng.uniform(-2, 2);
    const GaeResult g = compute_gae(r, v, d, bootstrap, 0.99, 0.98);
    for (std::size_t t = 0; t < n; ++t) {
      double acc = 0.0, w = 1.0;
      for (std::size_t k = t; k < n; ++k) {
        const double vn = k + 1 < n ? v[k + 1] : bootstrap;
        acc += w * (r[k] + 0.99 * (d[k] ? 0.0 : 1.0) * vn - v[k]);
        if (d[k]) break;
        w *= 0.99 * 0.98;
      }
      ok = ok && std::abs(g.advantages[t] - acc) < 1e-10;
    }
  }
  os << (ok ? "[pass]" : "[FAIL]") << " gae recursion vs explicit summation\n";
  return ok;
}

bool verify_clearance(std::ostream& os) {
  Rng rng(1004);
  SamplingMpcConfig cfg;
  VehicleParams params;
  bool ok = true;
  for (int trial = 0; trial < 100 && ok; ++trial) {
    const VehicleState s{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-kPi, kPi),
                         rng.uniform(0.5, 4.0), 0.0};
    CandidateTrajectory traj =
        rollout(s, rng.uniform(-0.4, 0.4), rng.uniform(0.5, 4.0), cfg, params);
    std::vector<Vec2> pts;
    const int n = 1 + static_cast<int>(rng.uniform_int(50));
    for (int i = 0; i < n; ++i) pts.push_back({rng.uniform(-4, 4), rng.uniform(-4, 4)});
    screen_clearance(traj, pts, cfg);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : traj.points)
      for (const auto& b : pts) best = std::min(best, (a - b).norm2());
    ok = ok && std::abs(traj.c_min - std::sqrt(best)) < 1e-9;
  }
  os << (ok ? "[pass]" : "[FAIL]") << " mpc clearance vs exhaustive pairwise oracle\n";
  return ok;
}

bool verify_impairments(std::ostream& os) {
  ImpairmentConfig cfg;  // base config
  cfg.p_out = 0.4;
  cfg.seed = 1005;
  ImpairmentState state;
  state.reset(cfg.seed);
  const double dt = 1.0 / 30.0;
  int delivered = 0, held = 0;
  double last_stamp = -1.0;
  bool age_ok = true, cone_ok = true;
  LidarMeta meta;
  for (int k = 0; k < 12000; ++k) {
    const double now = k * dt;
    LidarScan scan;
    scan.stamp = now;
    scan.meta = meta;
    scan.ranges.assign(meta.beam_count, 5.0);
    const auto out = impair_stream(scan, now, cfg, state);
    if (!out || now < cfg.delay) continue;
    ++delivered;
    age_ok = age_ok && now - out->stamp >= cfg.delay - 1e-9;
    if (out->stamp == last_stamp) ++held;
    last_stamp = out->stamp;
    for (int i = 0; i < out->beam_count(); ++i)
      if (out->ranges[i] == cfg.r_out)
        cone_ok = cone_ok && std::abs(out->angle_of(i)) <= cfg.cone / 2 + 1e-9;
  }
  const double hold_frac = static_cast<double>(held) / delivered;
  const bool hold_ok = std::abs(hold_frac - cfg.p_drop) < 0.02;
  bool ok = age_ok && cone_ok && hold_ok;
  os << (ok ? "[pass]" : "[FAIL]") << " impairment statistics (hold " << hold_frac
     << ", age floor " << (age_ok ? "held" : "violated") << ", cone "
     << (cone_ok ? "respected" : "violated") << ")\n";
  return ok;
}

}  // namespace

bool run_verify_suites(std::ostream& os) {
  bool ok = true;
  ok = verify_pure_pursuit(os) && ok;
  ok = verify_fusion(os) && ok;
  ok = verify_gae(os) && ok;
  ok = verify_clearance(os) && ok;
  ok = verify_impairments(os) && ok;
  os << (ok ? "verify: all oracle suites passed\n" : "verify: FAILURES present\n");
  return ok;
}

}  // namespace arbsim
