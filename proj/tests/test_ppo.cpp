#include <doctest.h>

#include <numeric>

#include "arbsim/errors.hpp"
#include "arbsim/ppo.hpp"

using namespace arbsim;

namespace {

// small buffer with generic values keeping every sample away from the clip
// kinks so central differences stay valid
RolloutBuffer toy_buffer(GatePolicy& policy, Rng& rng, int n) {
  RolloutBuffer buf;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd obs(policy.obs_dim());
    for (int j = 0; j < policy.obs_dim(); ++j) obs(j) = rng.uniform(-1.5, 1.5);
    const double z = policy.sample_z(obs, rng);
    // behavior log-prob deliberately offset so the ratios are not 1
    const double logp = policy.log_prob(obs, z) + rng.uniform(-0.05, 0.05);
    const double value = policy.value(obs);
    buf.push(obs, z, logp, value, rng.uniform(-1, 1), false);
  }
  buf.finish(0.0, 0.99, 0.98);
  return buf;
}

}  // namespace

TEST_CASE("analytic gradient matches central finite differences") {
  GatePolicy policy(4, {6, 6}, 2024);
  Rng rng(55);
  RolloutBuffer buf = toy_buffer(policy, rng, 3);
  std::vector<int> idx(3);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> adv{0.8, -1.1, 0.4};

  PpoHyperparams hp;
  Eigen::VectorXd grad;
  ppo_loss(policy, buf, idx, adv, hp, &grad);

  Eigen::VectorXd theta = policy.flatten_params();
  const double h = 1e-5;
  int checked = 0;
  for (int p = 0; p < theta.size(); ++p) {
    Eigen::VectorXd tp = theta;
    tp(p) = theta(p) + h;
    policy.set_params(tp);
    const double lp = ppo_loss(policy, buf, idx, adv, hp, nullptr).loss;
    tp(p) = theta(p) - h;
    policy.set_params(tp);
    const double lm = ppo_loss(policy, buf, idx, adv, hp, nullptr).loss;
    policy.set_params(theta);
    const double fd = (lp - lm) / (2.0 * h);
    const double denom = std::max({std::abs(fd), std::abs(grad(p)), 1e-3});
    CHECK(std::abs(fd - grad(p)) / denom <= 1e-4);
    ++checked;
  }
  CHECK(checked == policy.param_count());
}

TEST_CASE("ratio 1 keeps the surrogate gradient unclipped") {
  // logp stored exactly equal to the current policy's: rho = 1 everywhere,
  // so the clip is inactive and the pg gradient equals -mean(A * dlogp)
  GatePolicy policy(3, {4}, 77);
  Rng rng(66);
  RolloutBuffer buf;
  for (int i = 0; i < 4; ++i) {
    Eigen::VectorXd obs(3);
    for (int j = 0; j < 3; ++j) obs(j) = rng.uniform(-1, 1);
    const double z = policy.sample_z(obs, rng);
    buf.push(obs, z, policy.log_prob(obs, z), policy.value(obs), 0.1, false);
  }
  buf.finish(0.0, 0.99, 0.98);
  std::vector<int> idx{0, 1, 2, 3};
  std::vector<double> adv{1.0, -0.5, 0.25, 0.75};
  PpoHyperparams hp;
  hp.vf_coef = 0.0;
  hp.ent_coef = 0.0;
  Eigen::VectorXd grad;
  const PpoLossStats stats = ppo_loss(policy, buf, idx, adv, hp, &grad);
  CHECK(stats.approx_kl == doctest::Approx(0.0));
  CHECK(stats.pg_loss == doctest::Approx(-std::accumulate(adv.begin(), adv.end(), 0.0) / 4.0)
                             .epsilon(1e-12));
  // compare against a directional finite difference of the unclipped surrogate
  Eigen::VectorXd theta = policy.flatten_params();
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(theta.size());
  dir(0) = 1.0;
  const double h = 1e-6;
  policy.set_params(theta + h * dir);
  const double lp = ppo_loss(policy, buf, idx, adv, hp, nullptr).loss;
  policy.set_params(theta - h * dir);
  const double lm = ppo_loss(policy, buf, idx, adv, hp, nullptr).loss;
  policy.set_params(theta);
  CHECK(grad(0) == doctest::Approx((lp - lm) / (2 * h)).epsilon(1e-4));
}

TEST_CASE("clipped-out samples contribute zero policy gradient") {
  // A > 0 with rho far above 1 + eps: the clipped branch is constant, so
  // perturbing the policy mean must not change the policy loss
  GatePolicy policy(2, {4}, 31);
  Eigen::VectorXd obs(2);
  obs << 0.3, -0.4;
  const double mu = policy.pi().forward(obs);
  const double z = mu + 0.1;
  RolloutBuffer buf;
  // old logp much smaller than new: rho = exp(new - old) >> 1 + eps
  buf.push(obs, z, policy.log_prob(obs, z) - 1.0, 0.0, 0.0, false);
  buf.finish(0.0, 0.99, 0.98);
  std::vector<int> idx{0};
  std::vector<double> adv{2.0};
  PpoHyperparams hp;
  hp.vf_coef = 0.0;
  hp.ent_coef = 0.0;
  Eigen::VectorXd grad;
  ppo_loss(policy, buf, idx, adv, hp, &grad);
  // every pi parameter gradient vanishes; log_std too (index after pi params)
  for (int p = 0; p < policy.pi().param_count() + 1; ++p) CHECK(grad(p) == 0.0);
}

TEST_CASE("clipped objective never exceeds the unclipped surrogate") {
  GatePolicy policy(3, {4}, 13);
  Rng rng(14);
  RolloutBuffer buf = toy_buffer(policy, rng, 16);
  std::vector<int> idx(16);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> adv(16);
  for (auto& a : adv) a = rng.uniform(-2, 2);
  PpoHyperparams hp;
  hp.vf_coef = 0.0;
  hp.ent_coef = 0.0;
  const double clipped = ppo_loss(policy, buf, idx, adv, hp, nullptr).pg_loss;
  // unclipped surrogate: -mean(rho A)
  double unclipped = 0.0;
  for (int k = 0; k < 16; ++k) {
    const double rho = std::exp(policy.log_prob(buf.obs[idx[k]], buf.z[idx[k]]) -
                                buf.logp[idx[k]]);
    unclipped += -rho * adv[k] / 16.0;
  }
  CHECK(clipped >= unclipped - 1e-12);
}

TEST_CASE("entropy scales the loss by its coefficient") {
  GatePolicy policy(3, {4}, 15);
  Rng rng(16);
  RolloutBuffer buf = toy_buffer(policy, rng, 4);
  std::vector<int> idx{0, 1, 2, 3};
  std::vector<double> adv{0.1, 0.2, -0.1, 0.3};
  PpoHyperparams a, b;
  a.ent_coef = 0.0;
  b.ent_coef = 0.5;
  const double la = ppo_loss(policy, buf, idx, adv, a, nullptr).loss;
  const double lb = ppo_loss(policy, buf, idx, adv, b, nullptr).loss;
  CHECK(la - lb == doctest::Approx(0.5 * policy.entropy()).epsilon(1e-12));
}

TEST_CASE("gradient clipping bounds the applied norm") {
  GatePolicy policy(4, {8, 8}, 91);
  Rng rng(92);
  RolloutBuffer buf = toy_buffer(policy, rng, 64);
  PpoHyperparams hp;
  hp.batch_size = 32;
  hp.epochs = 2;
  hp.target_kl = 1e9;  // keep every minibatch
  AdamOptimizer adam;
  Rng shuffle(1);
  const PpoUpdateStats stats = ppo_update(policy, adam, buf, hp, 3e-4, shuffle);
  CHECK(stats.minibatches_applied == 4);
  CHECK(stats.grad_norm <= hp.max_grad_norm + 1e-9);
}

TEST_CASE("kl early stop halts the update") {
  GatePolicy policy(4, {8, 8}, 101);
  Rng rng(102);
  RolloutBuffer buf;
  // stored logp far from the policy's: large ratios, large approximate KL
  for (int i = 0; i < 64; ++i) {
    Eigen::VectorXd obs(4);
    for (int j = 0; j < 4; ++j) obs(j) = rng.uniform(-1, 1);
    const double z = policy.sample_z(obs, rng);
    buf.push(obs, z, policy.log_prob(obs, z) - 2.0, policy.value(obs), 0.0, false);
  }
  buf.finish(0.0, 0.99, 0.98);
  PpoHyperparams hp;
  hp.batch_size = 32;
  hp.epochs = 3;
  AdamOptimizer adam;
  Rng shuffle(2);
  const PpoUpdateStats stats = ppo_update(policy, adam, buf, hp, 3e-4, shuffle);
  CHECK(stats.early_stopped);
  CHECK(stats.minibatches_applied == 0);
}

TEST_CASE("non-finite loss restores parameters and throws") {
  GatePolicy policy(4, {8, 8}, 111);
  Rng rng(112);
  RolloutBuffer buf = toy_buffer(policy, rng, 32);
  buf.advantage[3] = std::numeric_limits<double>::infinity();
  const Eigen::VectorXd before = policy.flatten_params();
  PpoHyperparams hp;
  hp.batch_size = 32;
  hp.normalize_advantages = false;
  AdamOptimizer adam;
  Rng shuffle(3);
  CHECK_THROWS_AS(ppo_update(policy, adam, buf, hp, 3e-4, shuffle), NonFiniteLoss);
  const Eigen::VectorXd after = policy.flatten_params();
  for (int i = 0; i < before.size(); ++i) REQUIRE(before(i) == after(i));
}

TEST_CASE("learning-rate schedule decays linearly") {
  PpoHyperparams hp;
  hp.total_steps = 100000;
  hp.lr_init = 2.4e-4;
  CHECK(hp.lr_at(0) == doctest::Approx(2.4e-4));
  CHECK(hp.lr_at(50000) == doctest::Approx(1.2e-4));
  CHECK(hp.lr_at(100000) == doctest::Approx(0.0));
}
