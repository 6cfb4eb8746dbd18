#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "arbsim/gate_policy.hpp"

namespace arbsim {

struct PpoHyperparams {
  long total_steps = 1'200'000;
  int n_steps = 4096;
  int batch_size = 256;
  int epochs = 5;
  double gamma = 0.99;
  double gae_lambda = 0.98;
  double clip = 0.2;
  double ent_coef = 0.02;
  double vf_coef = 0.6;
  double max_grad_norm = 0.7;
  double target_kl = 0.015;
  double lr_init = 2.4e-4;  // eta(frac) = lr_init * frac, frac = remaining fraction
  long eval_every = 5000;
  int eval_episodes = 8;
  long checkpoint_every = 25000;
  bool normalize_advantages = true;

  double lr_at(long step) const {
    const double frac = 1.0 - static_cast<double>(step) / static_cast<double>(total_steps);
    return lr_init * (frac > 0.0 ? frac : 0.0);
  }
};

// flat arrays of one rollout; observations stored normalized (statistics as of
// collection time)
struct RolloutBuffer {
  std::vector<Eigen::VectorXd> obs;
  std::vector<double> z;       // sampled unconstrained action
  std::vector<double> logp;    // behavior log-prob of z
  std::vector<double> value;
  std::vector<double> reward;
  std::vector<uint8_t> done;
  std::vector<double> advantage;
  std::vector<double> ret;

  int size() const { return static_cast<int>(obs.size()); }
  void clear();
  void push(const Eigen::VectorXd& o, double z_, double logp_, double value_, double reward_,
            bool done_);
  // fills advantage / ret via GAE
  void finish(double bootstrap_value, double gamma, double lambda);
};

struct PpoLossStats {
  double loss = 0.0;
  double pg_loss = 0.0;
  double v_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
};

// Clipped-surrogate loss and its analytic gradient over the given sample
// indices, holding the buffer (including advantages) fixed:
//   L = mean max(-rho A, -clip(rho) A) + vf_coef mean (V - R)^2 - ent_coef H
// The gradient layout matches GatePolicy::flatten_params. Used directly by
// the finite-difference check.
PpoLossStats ppo_loss(const GatePolicy& policy, const RolloutBuffer& buffer,
                      std::span<const int> idx, std::span<const double> advantages,
                      const PpoHyperparams& hp, Eigen::VectorXd* grad);

struct AdamOptimizer {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long t = 0;

  void reset(int dim);
  void step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad, double lr);
};

struct PpoUpdateStats {
  double pg_loss = 0.0;
  double v_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double grad_norm = 0.0;  // post-clip norm of the last applied gradient
  int minibatches_applied = 0;
  bool early_stopped = false;
  bool aborted_non_finite = false;
};

// One PPO update over the full buffer: up to `epochs` passes of shuffled
// minibatches, per-minibatch advantage normalization, approximate-KL early
// stop, gradient-norm clipping, Adam. A non-finite loss or gradient restores
// the pre-update parameters and aborts.
PpoUpdateStats ppo_update(GatePolicy& policy, AdamOptimizer& adam, const RolloutBuffer& buffer,
                          const PpoHyperparams& hp, double lr, Rng& shuffle_rng);

}  // namespace arbsim
