#include <doctest.h>

#include "arbsim/arbiter.hpp"
#include "arbsim/lidar.hpp"
#include "arbsim/rng.hpp"

using namespace arbsim;

TEST_CASE("smooth_gate: beta = 1 passes alpha through") {
  CHECK(smooth_gate(0.3, 0.9, 1.0) == 0.9);
}

TEST_CASE("smooth_gate: unit step unrolls to 1-(1-beta)^n") {
  double ab = 0.0;
  for (int i = 0; i < 3; ++i) ab = smooth_gate(ab, 1.0, 0.3);
  CHECK(ab == doctest::Approx(0.657).epsilon(1e-12));
  // geometric convergence to a constant input
  double x = 0.0;
  for (int i = 0; i < 200; ++i) x = smooth_gate(x, 0.42, 0.3);
  CHECK(x == doctest::Approx(0.42).epsilon(1e-9));
}

TEST_CASE("smooth_gate: step size bounded by beta and range preserved") {
  Rng rng(5);
  double ab = rng.uniform();
  for (int i = 0; i < 1000; ++i) {
    const double alpha = rng.uniform();
    const double next = smooth_gate(ab, alpha, 0.3);
    CHECK(std::abs(next - ab) <= 0.3 + 1e-12);
    CHECK(next >= 0.0);
    CHECK(next <= 1.0);
    ab = next;
  }
}

TEST_CASE("interaction automaton activates exactly on the n_on-th step") {
  InteractionConfig cfg;  // n_on = 3, n_off = 10
  InteractionDetector det;
  CHECK(!det.update(1.0, 2.0, cfg));  // constrained step 1
  CHECK(!det.update(1.0, 2.0, cfg));  // constrained step 2
  CHECK(det.update(1.0, 2.0, cfg));   // step 3: active
}

TEST_CASE("interaction automaton needs consecutive constrained steps") {
  InteractionConfig cfg;
  InteractionDetector det;
  det.update(1.0, 2.0, cfg);
  det.update(1.0, 2.0, cfg);
  det.update(10.0, 20.0, cfg);  // streak broken
  CHECK(!det.update(1.0, 2.0, cfg));
  CHECK(!det.update(1.0, 2.0, cfg));
  CHECK(det.update(1.0, 2.0, cfg));
}

TEST_CASE("single-step clearance blip does not deactivate") {
  InteractionConfig cfg;
  InteractionDetector det;
  for (int i = 0; i < 3; ++i) det.update(1.0, 2.0, cfg);
  REQUIRE(det.active());
  CHECK(det.update(10.0, 20.0, cfg));  // one cleared step
  CHECK(det.update(1.0, 2.0, cfg));    // constrained again: still active
  // sustained clearance for n_off steps deactivates
  for (int i = 0; i < 9; ++i) CHECK(det.update(10.0, 20.0, cfg));
  CHECK(!det.update(10.0, 20.0, cfg));
}

TEST_CASE("deactivation requires both conditions cleared") {
  InteractionConfig cfg;
  InteractionDetector det;
  for (int i = 0; i < 3; ++i) det.update(1.0, 2.0, cfg);
  // front clear but opponent still inside the headway: stays active
  for (int i = 0; i < 50; ++i) CHECK(det.update(10.0, 2.0, cfg));
}

TEST_CASE("fuse endpoints are bitwise inputs") {
  VehicleParams p;
  const AckermannCommand u_pp{0.2, 3.0};
  const AckermannCommand u_gf{-0.1, 1.0};
  const AckermannCommand a = fuse(u_pp, u_gf, 0.0, p);
  CHECK(a.steering == u_pp.steering);
  CHECK(a.speed == u_pp.speed);
  const AckermannCommand b = fuse(u_pp, u_gf, 1.0, p);
  CHECK(b.steering == u_gf.steering);
  CHECK(b.speed == u_gf.speed);
  const AckermannCommand mid = fuse(u_pp, u_gf, 0.5, p);
  CHECK(mid.steering == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(mid.speed == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("fused command stays inside the interval of its inputs") {
  VehicleParams p;
  p.steer_min = -10;
  p.steer_max = 10;
  p.speed_min = -100;
  p.speed_max = 100;  // saturation out of the way
  Rng rng(77);
  for (int i = 0; i < 1000; ++i) {
    const AckermannCommand u_pp{rng.uniform(-0.4, 0.4), rng.uniform(0, 6)};
    const AckermannCommand u_gf{rng.uniform(-0.4, 0.4), rng.uniform(0, 6)};
    const double a = rng.uniform();
    const AckermannCommand f = fuse(u_pp, u_gf, a, p);
    CHECK(f.steering >= std::min(u_pp.steering, u_gf.steering) - 1e-12);
    CHECK(f.steering <= std::max(u_pp.steering, u_gf.steering) + 1e-12);
    CHECK(f.speed >= std::min(u_pp.speed, u_gf.speed) - 1e-12);
    CHECK(f.speed <= std::max(u_pp.speed, u_gf.speed) + 1e-12);
  }
}

TEST_CASE("safety override fires on clearance and staleness") {
  SafetyConfig cfg;  // c_min 0.25, tau_max 0.5
  const AckermannCommand cmd{0.1, 2.0};
  std::string reason;

  const AckermannCommand ok = safety_override(cmd, 1.0, 0.1, 0.0, cfg, &reason);
  CHECK(ok.speed == 2.0);
  CHECK(reason.empty());

  const AckermannCommand low = safety_override(cmd, 0.125, 0.1, 0.0, cfg, &reason);
  CHECK(low.speed == 0.0);
  CHECK(reason == "clearance");

  const AckermannCommand stale = safety_override(cmd, 1.0, 0.5 + 1.0 / 30.0, 0.0, cfg, &reason);
  CHECK(stale.speed == 0.0);
  CHECK(reason == "scan_stale");

  const AckermannCommand missing = safety_override(cmd, 1.0, std::nullopt, 0.0, cfg, &reason);
  CHECK(missing.speed == 0.0);
}

namespace {

// closed-track fixture with an open corridor scan
struct StepFixture {
  Raceline line;
  LidarScan scan;
  VehicleState ego{0.0, 0.0, 0.0, 2.0, 0.0};
  VehicleState opp{40.0, 0.0, 0.0, 1.0, 0.0};

  StepFixture() {
    line.closed = false;
    for (int i = 0; i < 200; ++i) line.wp.push_back({{i * 0.5, 0.0}, 3.0});
    line.finalize();
    scan.stamp = 0.0;
    scan.ranges.assign(scan.meta.beam_count, 10.0);
  }

  MessageBus bus(double now) const {
    MessageBus b;
    LidarScan s = scan;
    s.stamp = now;
    b.publish(topics::kScanImpaired, now, s);
    b.publish(topics::kEgoOdom, now, ego);
    b.publish(topics::kOppOdom, now, opp);
    return b;
  }
};

Arbiter make_arbiter(uint64_t policy_seed = 42) {
  GatePolicy policy(Observation::kDim, {64, 64}, policy_seed);
  return Arbiter(std::move(policy), {}, {}, {}, {}, {}, {}, 1);
}

}  // namespace

TEST_CASE("inactive interaction publishes pure pursuit bitwise") {
  StepFixture fx;
  Arbiter arb = make_arbiter();
  const MessageBus bus = fx.bus(0.0);
  ArbiterDiag diag;
  const AckermannCommand out = arb.step(bus, fx.line, 0.0, &diag);
  CHECK(!diag.interaction);
  CHECK(diag.alpha_exec == 0.0);
  CHECK(out.steering == diag.u_pp.steering);
  CHECK(out.speed == diag.u_pp.speed);
}

TEST_CASE("saturated-high gate follows gap follow during interaction") {
  StepFixture fx;
  Arbiter arb = make_arbiter();
  // pin the policy to z >> 0
  arb.policy().pi().layers().back().W.setZero();
  arb.policy().pi().layers().back().b.setConstant(20.0);

  // opponent close ahead; front cone blocked at 2 m so the automaton arms
  fx.opp = {2.0, 0.0, 0.0, 1.0, 0.0};
  for (int i = 0; i < fx.scan.beam_count(); ++i)
    if (std::abs(fx.scan.angle_of(i)) < deg2rad(25.0)) fx.scan.ranges[i] = 2.0;

  AckermannCommand out;
  ArbiterDiag diag;
  double now = 0.0;
  for (int i = 0; i < 40; ++i, now += 1.0 / 30.0) {
    out = arb.step(fx.bus(now), fx.line, now, &diag);
  }
  REQUIRE(diag.interaction);
  CHECK(diag.alpha_raw > 0.9999);
  // alpha_bar converged to ~1, so the command tracks gap follow
  CHECK(out.steering == doctest::Approx(diag.u_gf.steering).epsilon(1e-3));
  CHECK(out.speed == doctest::Approx(diag.u_gf.speed).epsilon(1e-3));
}

TEST_CASE("pipeline replay: step equals the offline composition") {
  StepFixture fx;
  fx.opp = {2.5, 0.3, 0.0, 1.0, 0.0};
  for (int i = 0; i < fx.scan.beam_count(); ++i)
    if (std::abs(fx.scan.angle_of(i)) < deg2rad(20.0)) fx.scan.ranges[i] = 2.5;

  Arbiter arb = make_arbiter(7);
  GatePolicy ref(Observation::kDim, {64, 64}, 7);

  const ArbiterConfig acfg;
  const SafetyConfig scfg;
  const ObservationConfig ocfg;
  const PurePursuitConfig pcfg;
  const GapFollowConfig gcfg;
  const VehicleParams params;

  double alpha_bar = 0.0;
  InteractionDetector det;
  double now = 0.0;
  for (int i = 0; i < 30; ++i, now += 1.0 / 30.0) {
    const MessageBus bus = fx.bus(now);
    ArbiterDiag diag;
    const AckermannCommand got = arb.step(bus, fx.line, now, &diag);

    // offline composition of the pipeline stages
    const LidarScan& scan = *bus.latest_as<LidarScan>(topics::kScanImpaired);
    const AckermannCommand u_pp = pure_pursuit(fx.ego, fx.line, pcfg, params);
    const AckermannCommand u_gf = gap_follow(scan, gcfg, params).cmd;
    const Observation obs = build_observation(fx.ego, fx.line, scan, &fx.opp, ocfg);
    const auto arr = obs.to_array();
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(arr.data(), arr.size());
    const GateOutput g = ref.forward_normalized(ref.normalizer().normalize(x));
    alpha_bar = smooth_gate(alpha_bar, g.alpha, acfg.beta_lpf);
    const bool interaction = det.update(obs.d_front, obs.d_opp, acfg.interaction);
    const double alpha_exec = interaction ? alpha_bar : 0.0;
    const AckermannCommand fused = fuse(u_pp, u_gf, alpha_exec, params);
    const double c_t = front_clearance_min(scan, scfg.front_cone);
    const AckermannCommand expect = safety_override(
        fused, c_t, *bus.age(topics::kScanImpaired, now), *bus.age(topics::kEgoOdom, now), scfg);

    CHECK(got.steering == expect.steering);
    CHECK(got.speed == expect.speed);
  }
}

TEST_CASE("missing scan forces a stop with a logged reason") {
  StepFixture fx;
  Arbiter arb = make_arbiter();
  MessageBus bus;
  bus.publish(topics::kEgoOdom, 0.0, fx.ego);
  ArbiterDiag diag;
  const AckermannCommand out = arb.step(bus, fx.line, 0.0, &diag);
  CHECK(out.speed == 0.0);
  CHECK(diag.overridden);
  CHECK(diag.override_reason == "scan_stale");
}
