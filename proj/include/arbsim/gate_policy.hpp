#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "arbsim/observation.hpp"
#include "arbsim/rng.hpp"

namespace arbsim {

// Per-feature streaming mean/variance used to normalize observations. The
// statistics update only while training collects rollouts; at evaluation they
// are frozen (nothing mutates them).
class RunningNormalizer {
 public:
  explicit RunningNormalizer(int dim = Observation::kDim);

  void update(const Eigen::VectorXd& x);
  Eigen::VectorXd normalize(const Eigen::VectorXd& x, bool clip = true) const;
  Eigen::VectorXd denormalize(const Eigen::VectorXd& z) const;

  int dim() const { return static_cast<int>(mean_.size()); }
  double count() const { return count_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& variance() const { return var_; }
  double clip_bound() const { return clip_; }

  void set_state(const Eigen::VectorXd& mean, const Eigen::VectorXd& var, double count,
                 double clip);

 private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd var_;  // population variance with a positive floor
  Eigen::VectorXd m2_;   // Welford sum of squared deviations
  double count_ = 0.0;
  double clip_ = 10.0;
  static constexpr double kVarFloor = 1e-8;
};

// Dense tanh MLP with a linear scalar head, plus manual backprop so the PPO
// update can be checked against finite differences parameter by parameter.
class Mlp {
 public:
  struct Layer {
    Eigen::MatrixXd W;
    Eigen::VectorXd b;
  };
  struct Cache {
    Eigen::VectorXd x;
    std::vector<Eigen::VectorXd> act;  // post-tanh hidden activations
    double out = 0.0;
  };
  struct Grads {
    std::vector<Layer> g;
    void setZero();
  };

  Mlp() = default;
  Mlp(int in_dim, const std::vector<int>& hidden, Rng& rng, double out_scale = 1.0);

  double forward(const Eigen::VectorXd& x, Cache* cache = nullptr) const;
  // d(loss)/d(out) -> accumulate into grads
  void backward(const Cache& cache, double dout, Grads& grads) const;

  Grads zero_grads() const;
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }
  int param_count() const;

 private:
  std::vector<Layer> layers_;
};

struct GateOutput {
  double alpha = 0.0;  // sigmoid(z)
  double z = 0.0;      // unconstrained gate before the squash
  double value = 0.0;
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Policy + value networks over the normalized observation. The action is the
// unconstrained scalar z drawn from a Gaussian with state-independent log-std;
// the executed gate is sigmoid(z).
class GatePolicy {
 public:
  GatePolicy() = default;
  GatePolicy(int obs_dim, const std::vector<int>& hidden, uint64_t seed);

  // deterministic forward (mean action); throws NonFiniteActivation
  GateOutput forward_normalized(const Eigen::VectorXd& obs_norm) const;
  // convenience: normalize (frozen statistics) then forward
  GateOutput forward(const Observation& obs) const;

  double sample_z(const Eigen::VectorXd& obs_norm, Rng& rng) const;
  double log_prob(const Eigen::VectorXd& obs_norm, double z) const;
  double entropy() const;  // Gaussian, state independent

  double value(const Eigen::VectorXd& obs_norm) const;

  Mlp& pi() { return pi_; }
  const Mlp& pi() const { return pi_; }
  Mlp& vf() { return vf_; }
  const Mlp& vf() const { return vf_; }
  double& log_std() { return log_std_; }
  double log_std() const { return log_std_; }
  RunningNormalizer& normalizer() { return norm_; }
  const RunningNormalizer& normalizer() const { return norm_; }

  // flat parameter vector in a fixed order: pi layers, log_std, vf layers
  Eigen::VectorXd flatten_params() const;
  void set_params(const Eigen::VectorXd& theta);
  int param_count() const;

  void save(const std::string& path) const;
  static GatePolicy load(const std::string& path);

  int obs_dim() const { return obs_dim_; }
  const std::vector<int>& hidden() const { return hidden_; }

 private:
  int obs_dim_ = Observation::kDim;
  std::vector<int> hidden_{64, 64};
  Mlp pi_;
  Mlp vf_;
  double log_std_ = 0.0;
  RunningNormalizer norm_{Observation::kDim};
};

}  // namespace arbsim
