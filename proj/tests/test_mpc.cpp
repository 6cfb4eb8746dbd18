#include <doctest.h>

#include "arbsim/bicycle.hpp"
#include "arbsim/mpc.hpp"
#include "arbsim/rng.hpp"

using namespace arbsim;

namespace {

Raceline straight_line(double speed = 2.0) {
  Raceline line;
  line.closed = false;
  for (int i = 0; i < 200; ++i) line.wp.push_back({{i * 0.5, 0.0}, speed});
  line.finalize();
  return line;
}

LidarScan open_scan(double now) {
  LidarScan scan;
  scan.stamp = now;
  scan.ranges.assign(scan.meta.beam_count, scan.meta.range_max);
  return scan;
}

}  // namespace

TEST_CASE("candidate fan: evenly spaced, clipped, table sizes") {
  SamplingMpcConfig cfg;
  VehicleParams params;
  const auto std_fan = generate_candidates(false, 0.0, cfg, params);
  REQUIRE(std_fan.size() == 9);
  for (int i = 0; i < 9; ++i)
    CHECK(std_fan[i] == doctest::Approx(-0.2 + 0.05 * i).epsilon(1e-12));

  const auto inter_fan = generate_candidates(true, 0.0, cfg, params);
  REQUIRE(inter_fan.size() == 17);
  CHECK(inter_fan.front() == doctest::Approx(params.steer_min));
  CHECK(inter_fan.back() == doctest::Approx(params.steer_max));

  // off-center fan clips to the limits
  const auto clipped = generate_candidates(false, 0.4, cfg, params);
  for (double d : clipped) {
    CHECK(d <= params.steer_max);
    CHECK(d >= params.steer_min);
  }
  CHECK(clipped.back() == doctest::Approx(params.steer_max));
}

TEST_CASE("rollout: straight candidate covers v * N * dt") {
  SamplingMpcConfig cfg;
  VehicleParams params;
  const VehicleState s{0, 0, 0, 2.0, 0.0};
  const CandidateTrajectory traj = rollout(s, 0.0, 2.0, cfg, params);
  REQUIRE(traj.points.size() == 9);
  CHECK(traj.points.back().x == doctest::Approx(1.6).epsilon(1e-12));
  CHECK(traj.points.back().y == doctest::Approx(0.0));
}

TEST_CASE("rollout: mirrored steering mirrors the trajectory") {
  SamplingMpcConfig cfg;
  VehicleParams params;
  const VehicleState s{0, 0, 0, 2.0, 0.0};
  const CandidateTrajectory l = rollout(s, 0.25, 2.0, cfg, params);
  const CandidateTrajectory r = rollout(s, -0.25, 2.0, cfg, params);
  for (std::size_t k = 0; k < l.points.size(); ++k) {
    CHECK(l.points[k].x == doctest::Approx(r.points[k].x).epsilon(1e-12));
    CHECK(l.points[k].y == doctest::Approx(-r.points[k].y).epsilon(1e-12));
  }
}

TEST_CASE("rollout matches a hand-iterated bicycle recursion") {
  SamplingMpcConfig cfg;
  VehicleParams params;
  const VehicleState s0{0.3, -0.1, 0.2, 2.0, 0.0};
  const CandidateTrajectory traj = rollout(s0, 0.2, 2.0, cfg, params);
  // explicit recursion oracle
  double x = 0.3, y = -0.1, h = 0.2;
  for (int k = 0; k < 8; ++k) {
    x += 2.0 * std::cos(h) * 0.1;
    y += 2.0 * std::sin(h) * 0.1;
    h += 2.0 / params.wheelbase * std::tan(0.2) * 0.1;
    CHECK(traj.points[k + 1].x == doctest::Approx(x).epsilon(1e-9));
    CHECK(traj.points[k + 1].y == doctest::Approx(y).epsilon(1e-9));
  }
}

TEST_CASE("screening: empty scan is feasible, close return is not") {
  SamplingMpcConfig cfg;
  VehicleParams params;
  CandidateTrajectory traj = rollout({0, 0, 0, 2, 0}, 0.0, 2.0, cfg, params);
  screen_clearance(traj, {}, cfg);
  CHECK(traj.feasible);
  CHECK(std::isinf(traj.c_min));

  // a return 0.3 m from a predicted point with r_safe 0.55
  screen_clearance(traj, {{0.8, 0.3}}, cfg);
  CHECK(!traj.feasible);
  CHECK(traj.c_min == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("screening c_min equals the exhaustive pairwise oracle") {
  SamplingMpcConfig cfg;
  VehicleParams params;
  Rng rng(2026);
  for (int trial = 0; trial < 100; ++trial) {
    const VehicleState s{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-kPi, kPi),
                         rng.uniform(0.5, 4.0), 0.0};
    CandidateTrajectory traj =
        rollout(s, rng.uniform(-0.4, 0.4), rng.uniform(0.5, 4.0), cfg, params);
    std::vector<Vec2> pts;
    const int n = 1 + static_cast<int>(rng.uniform_int(60));
    for (int i = 0; i < n; ++i) pts.push_back({rng.uniform(-4, 4), rng.uniform(-4, 4)});
    screen_clearance(traj, pts, cfg);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : traj.points)
      for (const auto& q : pts) best = std::min(best, (p - q).norm2());
    CHECK(traj.c_min == doctest::Approx(std::sqrt(best)).epsilon(1e-9));
    CHECK(traj.feasible == (traj.c_min >= cfg.r_safe));
  }
}

TEST_CASE("cost: perfect tracking leaves only the progress term") {
  SamplingMpcConfig cfg;
  VehicleParams params;
  const Raceline line = straight_line(2.0);
  // candidate exactly on the reference
  CandidateTrajectory traj = rollout({0, 0, 0, 2, 0}, 0.0, 2.0, cfg, params);
  traj.feasible = true;
  traj.c_min = 10.0;
  const double j = candidate_cost(traj, line, 0.0, cfg, false);
  CHECK(j == doctest::Approx(-cfg.w_prog_standard * 1.6).epsilon(1e-6));
}

TEST_CASE("cost: steering magnitude strictly increases J, infeasible gets the penalty") {
  SamplingMpcConfig cfg;
  VehicleParams params;
  const Raceline line = straight_line(2.0);
  CandidateTrajectory small = rollout({0, 0, 0, 2, 0}, 0.05, 2.0, cfg, params);
  CandidateTrajectory large = rollout({0, 0, 0, 2, 0}, 0.05, 2.0, cfg, params);
  small.feasible = large.feasible = true;
  small.c_min = large.c_min = 10.0;
  large.steering = 0.2;  // same path, larger steering term isolates w_delta
  const double js = candidate_cost(small, line, 0.0, cfg, false);
  const double jl = candidate_cost(large, line, 0.0, cfg, false);
  CHECK(jl > js);
  CHECK(jl - js == doctest::Approx(cfg.w_delta_standard * (0.04 - 0.0025)).epsilon(1e-9));

  CandidateTrajectory blocked = small;
  blocked.feasible = false;
  CHECK(candidate_cost(blocked, line, 0.0, cfg, false) == cfg.j_penalty);
}

TEST_CASE("cost: hand-built three-step trajectory matches arithmetic") {
  SamplingMpcConfig cfg;
  cfg.horizon = 3;
  VehicleParams params;
  const Raceline line = straight_line(1.0);
  CandidateTrajectory traj;
  traj.steering = 0.1;
  traj.speed = 1.0;
  traj.points = {{0.0, 0.1}, {0.1, 0.2}, {0.2, 0.0}, {0.31, -0.05}};
  traj.feasible = true;
  traj.c_min = 0.9;
  // refs at s = 0, 0.1, 0.2, 0.3 on the x axis
  const double trk = (0.1 * 0.1) + (0.2 * 0.2) + (0.0 + 0.0) + (0.01 * 0.01 + 0.05 * 0.05);
  const double prog = 0.31;
  const double phi = (1.2 - 0.9) * (1.2 - 0.9);
  const double expect = cfg.w_trk_standard * trk + cfg.w_delta_standard * 0.01 -
                        cfg.w_prog_standard * prog + cfg.w_obs_standard * phi;
  CHECK(candidate_cost(traj, line, 0.0, cfg, false) == doctest::Approx(expect).epsilon(1e-9));
}

namespace {
MessageBus mpc_bus(double now, const VehicleState& ego, const LidarScan& scan,
                   const VehicleState* opp = nullptr) {
  MessageBus bus;
  bus.publish(topics::kScanImpaired, now, scan);
  bus.publish(topics::kEgoOdom, now, ego);
  if (opp) bus.publish(topics::kOppOdom, now, *opp);
  return bus;
}
}  // namespace

TEST_CASE("mpc step: straight open reference selects near-zero steering") {
  SamplingMpcConfig cfg;
  ObservationConfig ocfg;
  VehicleParams params;
  SamplingMpc mpc(cfg, ocfg, params);
  const Raceline line = straight_line(2.0);
  const VehicleState ego{3.0, 0.0, 0.0, 2.0, 0.0};
  MpcDiag diag;
  const AckermannCommand cmd = mpc.step(mpc_bus(0.0, ego, open_scan(0.0)), line, 0.0, &diag);
  const double spacing = 2.0 * cfg.span_standard / (cfg.m_standard - 1);
  CHECK(std::abs(cmd.steering) <= spacing + 1e-9);
  CHECK(!diag.interaction);
  CHECK(diag.selected >= 0);
  // selected candidate attains the minimum cost over the whole fan
  for (const auto& c : diag.candidates)
    CHECK(diag.candidates[diag.selected].cost <= c.cost + 1e-12);
}

TEST_CASE("mpc step: wall ring blocks every candidate and stops") {
  SamplingMpcConfig cfg;
  ObservationConfig ocfg;
  VehicleParams params;
  SamplingMpc mpc(cfg, ocfg, params);
  const Raceline line = straight_line(2.0);
  const VehicleState ego{3.0, 0.0, 0.0, 2.0, 0.0};
  LidarScan scan = open_scan(0.0);
  for (auto& r : scan.ranges) r = 0.4;  // returns closer than r_safe everywhere
  MpcDiag diag;
  const AckermannCommand cmd = mpc.step(mpc_bus(0.0, ego, scan), line, 0.0, &diag);
  CHECK(cmd.steering == 0.0);
  CHECK(cmd.speed == 0.0);
  CHECK(diag.selected == -1);
}

TEST_CASE("mpc step: deterministic for identical inputs") {
  SamplingMpcConfig cfg;
  ObservationConfig ocfg;
  VehicleParams params;
  const Raceline line = straight_line(2.0);
  const VehicleState ego{3.0, 0.2, 0.05, 1.5, 0.0};
  LidarScan scan = open_scan(0.0);
  for (int i = 0; i < scan.beam_count(); ++i)
    if (std::abs(scan.angle_of(i)) < 0.3) scan.ranges[i] = 2.5;
  SamplingMpc a(cfg, ocfg, params), b(cfg, ocfg, params);
  const AckermannCommand ca = a.step(mpc_bus(0.0, ego, scan), line, 0.0);
  const AckermannCommand cb = b.step(mpc_bus(0.0, ego, scan), line, 0.0);
  CHECK(ca.steering == cb.steering);
  CHECK(ca.speed == cb.speed);
}

TEST_CASE("outlier injection shrinks or preserves the feasible set") {
  SamplingMpcConfig cfg;
  ObservationConfig ocfg;
  VehicleParams params;
  const Raceline line = straight_line(2.0);
  const VehicleState ego{3.0, 0.0, 0.0, 2.0, 0.0};

  LidarScan clean = open_scan(0.0);
  for (int i = 0; i < clean.beam_count(); ++i)
    if (std::abs(clean.angle_of(i)) < 0.5) clean.ranges[i] = 6.0;

  LidarScan spiked = clean;
  for (int i = 0; i < spiked.beam_count(); ++i)
    if (std::abs(spiked.angle_of(i)) < deg2rad(5.0)) spiked.ranges[i] = 0.10;

  auto feasible_count = [&](const LidarScan& scan) {
    SamplingMpc mpc(cfg, ocfg, params);
    MpcDiag diag;
    mpc.step(mpc_bus(0.0, ego, scan), line, 0.0, &diag);
    int n = 0;
    for (const auto& c : diag.candidates) n += c.feasible ? 1 : 0;
    return n;
  };
  CHECK(feasible_count(spiked) <= feasible_count(clean));
  CHECK(feasible_count(spiked) < feasible_count(clean));  // outliers at 0.10 m bite
}
