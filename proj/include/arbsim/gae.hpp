#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace arbsim {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantages + values
};

// Backward GAE recursion:
//   delta_t = r_t + gamma (1 - done_t) V_{t+1} - V_t
//   A_t     = delta_t + gamma lambda (1 - done_t) A_{t+1}
// with V_{T} taken from bootstrap_value. done_t = 1 cuts both the bootstrap
// and the accumulation at step t. Throws LengthMismatch on ragged inputs.
GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      std::span<const uint8_t> dones, double bootstrap_value, double gamma,
                      double lambda);

}  // namespace arbsim
