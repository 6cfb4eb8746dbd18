#include <doctest.h>

#include <filesystem>

#include "arbsim/errors.hpp"
#include "arbsim/gate_policy.hpp"

using namespace arbsim;

TEST_CASE("sigmoid midpoint and saturation") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(20.0) > 0.9999);
  CHECK(sigmoid(-20.0) < 0.0001);
  for (double z : {-7.3, -1.0, 0.2, 4.4}) {
    CHECK(sigmoid(z) + sigmoid(-z) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("hand-computed forward pass on a fixed tiny network") {
  // 2 inputs, one hidden layer of 2 tanh units, scalar head
  GatePolicy p(2, {2}, 7);
  auto& pi = p.pi().layers();
  pi[0].W << 0.5, -0.25, 0.1, 0.3;
  pi[0].b << 0.05, -0.1;
  pi[1].W << 1.5, -2.0;
  pi[1].b << 0.2;
  auto& vf = p.vf().layers();
  vf[0].W << 0.0, 0.0, 0.0, 0.0;
  vf[0].b << 0.0, 0.0;
  vf[1].W << 0.0, 0.0;
  vf[1].b << -0.3;

  Eigen::VectorXd x(2);
  x << 0.4, -0.8;
  // manual matrix arithmetic oracle
  const double h0 = std::tanh(0.5 * 0.4 + -0.25 * -0.8 + 0.05);
  const double h1 = std::tanh(0.1 * 0.4 + 0.3 * -0.8 + -0.1);
  const double z = 1.5 * h0 + -2.0 * h1 + 0.2;
  const double alpha = 1.0 / (1.0 + std::exp(-z));

  const GateOutput out = p.forward_normalized(x);
  CHECK(out.z == doctest::Approx(z).epsilon(1e-6));
  CHECK(out.alpha == doctest::Approx(alpha).epsilon(1e-6));
  CHECK(out.value == doctest::Approx(-0.3).epsilon(1e-12));
}

TEST_CASE("zeroed policy head gives alpha exactly one half") {
  GatePolicy p(Observation::kDim, {8, 8}, 3);
  p.pi().layers().back().W.setZero();
  p.pi().layers().back().b.setZero();
  Eigen::VectorXd x = Eigen::VectorXd::Constant(Observation::kDim, 0.7);
  const GateOutput out = p.forward_normalized(x);
  CHECK(out.z == 0.0);
  CHECK(out.alpha == 0.5);
}

TEST_CASE("non-finite weights raise NonFiniteActivation") {
  GatePolicy p(4, {4}, 5);
  p.pi().layers()[0].W(0, 0) = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd x = Eigen::VectorXd::Ones(4);
  CHECK_THROWS_AS(p.forward_normalized(x), NonFiniteActivation);
}

TEST_CASE("normalizer streaming statistics equal two-pass statistics") {
  Rng rng(17);
  RunningNormalizer norm(3);
  std::vector<Eigen::VectorXd> data;
  for (int i = 0; i < 5000; ++i) {
    Eigen::VectorXd x(3);
    x << rng.normal(2.0, 3.0), rng.uniform(-1, 1), rng.normal(-4.0, 0.5);
    data.push_back(x);
    norm.update(x);
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
  for (const auto& x : data) mean += x;
  mean /= data.size();
  Eigen::VectorXd var = Eigen::VectorXd::Zero(3);
  for (const auto& x : data) var += (x - mean).cwiseProduct(x - mean);
  var /= data.size();
  for (int i = 0; i < 3; ++i) {
    CHECK(norm.mean()(i) == doctest::Approx(mean(i)).epsilon(1e-8));
    CHECK(norm.variance()(i) == doctest::Approx(var(i)).epsilon(1e-8));
  }
}

TEST_CASE("normalize then denormalize recovers the raw vector") {
  Rng rng(19);
  RunningNormalizer norm(Observation::kDim);
  for (int i = 0; i < 300; ++i) {
    Eigen::VectorXd x(Observation::kDim);
    for (int j = 0; j < Observation::kDim; ++j) x(j) = rng.uniform(-5, 5);
    norm.update(x);
  }
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd x(Observation::kDim);
    for (int j = 0; j < Observation::kDim; ++j) x(j) = rng.uniform(-5, 5);
    const Eigen::VectorXd back = norm.denormalize(norm.normalize(x, /*clip=*/false));
    for (int j = 0; j < Observation::kDim; ++j)
      CHECK(back(j) == doctest::Approx(x(j)).epsilon(1e-9));
  }
}

TEST_CASE("checkpoint round-trip is bit-exact") {
  GatePolicy p(Observation::kDim, {64, 64}, 11);
  // make the normalizer non-trivial
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd x(Observation::kDim);
    for (int j = 0; j < Observation::kDim; ++j) x(j) = rng.uniform(-4, 4);
    p.normalizer().update(x);
  }
  p.log_std() = -0.731;

  const auto path = std::filesystem::temp_directory_path() / "arbsim_policy_test.ckpt";
  p.save(path.string());
  const GatePolicy q = GatePolicy::load(path.string());
  std::filesystem::remove(path);

  const Eigen::VectorXd tp = p.flatten_params();
  const Eigen::VectorXd tq = q.flatten_params();
  REQUIRE(tp.size() == tq.size());
  for (int i = 0; i < tp.size(); ++i) REQUIRE(tp(i) == tq(i));

  Eigen::VectorXd x(Observation::kDim);
  for (int j = 0; j < Observation::kDim; ++j) x(j) = 0.3 * j - 1.0;
  const GateOutput a = p.forward_normalized(p.normalizer().normalize(x));
  const GateOutput b = q.forward_normalized(q.normalizer().normalize(x));
  CHECK(a.z == b.z);
  CHECK(a.value == b.value);
}

TEST_CASE("flatten and set_params round-trip") {
  GatePolicy p(6, {8, 8}, 23);
  const Eigen::VectorXd theta = p.flatten_params();
  GatePolicy q(6, {8, 8}, 99);
  q.set_params(theta);
  const Eigen::VectorXd back = q.flatten_params();
  for (int i = 0; i < theta.size(); ++i) REQUIRE(theta(i) == back(i));
}
