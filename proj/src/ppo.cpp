#include "arbsim/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "arbsim/errors.hpp"
#include "arbsim/gae.hpp"

namespace arbsim {

void RolloutBuffer::clear() {
  obs.clear();
  z.clear();
  logp.clear();
  value.clear();
  reward.clear();
  done.clear();
  advantage.clear();
  ret.clear();
}

void RolloutBuffer::push(const Eigen::VectorXd& o, double z_, double logp_, double value_,
                         double reward_, bool done_) {
  obs.push_back(o);
  z.push_back(z_);
  logp.push_back(logp_);
  value.push_back(value_);
  reward.push_back(reward_);
  done.push_back(done_ ? 1 : 0);
}

void RolloutBuffer::finish(double bootstrap_value, double gamma, double lambda) {
  const GaeResult g = compute_gae(reward, value, done, bootstrap_value, gamma, lambda);
  advantage = g.advantages;
  ret = g.returns;
}

PpoLossStats ppo_loss(const GatePolicy& policy, const RolloutBuffer& buffer,
                      std::span<const int> idx, std::span<const double> advantages,
                      const PpoHyperparams& hp, Eigen::VectorXd* grad) {
  const int n = static_cast<int>(idx.size());
  const double inv_n = 1.0 / static_cast<double>(n);
  const double std = std::exp(policy.log_std());
  const double inv_var = 1.0 / (std * std);

  Mlp::Grads pi_grads = policy.pi().zero_grads();
  Mlp::Grads vf_grads = policy.vf().zero_grads();
  double dlog_std = 0.0;

  PpoLossStats stats;
  for (int k = 0; k < n; ++k) {
    const int i = idx[k];
    const double a = advantages[k];

    Mlp::Cache pi_cache;
    const double mu = policy.pi().forward(buffer.obs[i], &pi_cache);
    const double d = buffer.z[i] - mu;
    const double logp_new =
        -0.5 * d * d * inv_var - policy.log_std() - 0.5 * std::log(2.0 * kPi);
    const double log_ratio = logp_new - buffer.logp[i];
    const double rho = std::exp(log_ratio);

    const double f = -rho * a;                                        // unclipped branch
    const double g = -clamp(rho, 1.0 - hp.clip, 1.0 + hp.clip) * a;   // clipped branch
    stats.pg_loss += std::max(f, g) * inv_n;
    stats.approx_kl += (rho - 1.0 - log_ratio) * inv_n;

    Mlp::Cache vf_cache;
    const double v = policy.vf().forward(buffer.obs[i], &vf_cache);
    const double verr = v - buffer.ret[i];
    stats.v_loss += verr * verr * inv_n;

    if (grad) {
      // surrogate gradient flows only through the active unclipped branch
      const double dpg_dlogp = f >= g ? -a * rho * inv_n : 0.0;
      const double dlogp_dmu = d * inv_var;
      policy.pi().backward(pi_cache, dpg_dlogp * dlogp_dmu, pi_grads);
      dlog_std += dpg_dlogp * (d * d * inv_var - 1.0);
      policy.vf().backward(vf_cache, hp.vf_coef * 2.0 * verr * inv_n, vf_grads);
    }
  }

  stats.entropy = policy.entropy();
  stats.loss = stats.pg_loss + hp.vf_coef * stats.v_loss - hp.ent_coef * stats.entropy;
  if (grad) {
    dlog_std -= hp.ent_coef;  // d(-ent_coef * H)/d(log_std), H' = 1
    grad->resize(policy.param_count());
    int kk = 0;
    for (const auto& l : pi_grads.g) {
      for (int r = 0; r < l.W.rows(); ++r)
        for (int c = 0; c < l.W.cols(); ++c) (*grad)(kk++) = l.W(r, c);
      for (int i2 = 0; i2 < l.b.size(); ++i2) (*grad)(kk++) = l.b(i2);
    }
    (*grad)(kk++) = dlog_std;
    for (const auto& l : vf_grads.g) {
      for (int r = 0; r < l.W.rows(); ++r)
        for (int c = 0; c < l.W.cols(); ++c) (*grad)(kk++) = l.W(r, c);
      for (int i2 = 0; i2 < l.b.size(); ++i2) (*grad)(kk++) = l.b(i2);
    }
  }
  return stats;
}

void AdamOptimizer::reset(int dim) {
  m = Eigen::VectorXd::Zero(dim);
  v = Eigen::VectorXd::Zero(dim);
  t = 0;
}

void AdamOptimizer::step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad, double lr) {
  if (m.size() != grad.size()) reset(static_cast<int>(grad.size()));
  ++t;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  const Eigen::VectorXd m_hat = m / bc1;
  const Eigen::VectorXd denom =
      (v / bc2).cwiseSqrt() + Eigen::VectorXd::Constant(m.size(), eps);
  theta -= lr * m_hat.cwiseQuotient(denom);
}

PpoUpdateStats ppo_update(GatePolicy& policy, AdamOptimizer& adam, const RolloutBuffer& buffer,
                          const PpoHyperparams& hp, double lr, Rng& shuffle_rng) {
  PpoUpdateStats out;
  const int n = buffer.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  const Eigen::VectorXd snapshot = policy.flatten_params();
  Eigen::VectorXd theta = snapshot;
  Eigen::VectorXd grad;

  for (int epoch = 0; epoch < hp.epochs && !out.early_stopped; ++epoch) {
    // Fisher-Yates with the trainer's stream
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(shuffle_rng.uniform_int(i + 1));
      std::swap(order[i], order[j]);
    }
    for (int start = 0; start + hp.batch_size <= n; start += hp.batch_size) {
      std::span<const int> idx(order.data() + start, hp.batch_size);

      std::vector<double> adv(hp.batch_size);
      for (int k = 0; k < hp.batch_size; ++k) adv[k] = buffer.advantage[idx[k]];
      if (hp.normalize_advantages) {
        double mean = 0.0;
        for (double a : adv) mean += a;
        mean /= adv.size();
        double var = 0.0;
        for (double a : adv) var += (a - mean) * (a - mean);
        var /= adv.size();
        const double inv_std = 1.0 / (std::sqrt(var) + 1e-8);
        for (double& a : adv) a = (a - mean) * inv_std;
      }

      const PpoLossStats stats = ppo_loss(policy, buffer, idx, adv, hp, &grad);
      if (!std::isfinite(stats.loss) || !grad.allFinite()) {
        policy.set_params(snapshot);
        out.aborted_non_finite = true;
        throw NonFiniteLoss("ppo update hit a non-finite loss; parameters restored");
      }
      out.approx_kl = stats.approx_kl;
      if (hp.target_kl > 0.0 && stats.approx_kl > hp.target_kl) {
        out.early_stopped = true;
        break;
      }

      const double norm = grad.norm();
      if (norm > hp.max_grad_norm && norm > 0.0) grad *= hp.max_grad_norm / norm;
      out.grad_norm = grad.norm();

      adam.step(theta, grad, lr);
      policy.set_params(theta);

      out.pg_loss = stats.pg_loss;
      out.v_loss = stats.v_loss;
      out.entropy = stats.entropy;
      ++out.minibatches_applied;
    }
  }
  return out;
}

}  // namespace arbsim
