#include "arbsim/gae.hpp"

#include "arbsim/errors.hpp"

namespace arbsim {

GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      std::span<const uint8_t> dones, double bootstrap_value, double gamma,
                      double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n)
    throw LengthMismatch("gae inputs must have equal length");
  GaeResult out;
  out.advantages.resize(n);
  out.returns.resize(n);
  double last_adv = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const double not_done = dones[t] ? 0.0 : 1.0;
    const double next_value = t + 1 < n ? values[t + 1] : bootstrap_value;
    const double delta = rewards[t] + gamma * not_done * next_value - values[t];
    last_adv = delta + gamma * lambda * not_done * last_adv;
    out.advantages[t] = last_adv;
    out.returns[t] = last_adv + values[t];
  }
  return out;
}

}  // namespace arbsim
