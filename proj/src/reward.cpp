#include "arbsim/reward.hpp"

#include <cmath>

namespace arbsim {

double compute_reward(const TransitionContext& ctx, const RewardConfig& cfg) {
  double r = cfg.w_prog * ctx.progress_delta;
  r += cfg.w_v * ctx.speed;
  r -= cfg.w_sm * std::abs(ctx.alpha - ctx.alpha_prev);
  r -= cfg.w_risk * barrier_psi(ctx.clearance, cfg.barrier_radius);
  if (ctx.pass_event) r += cfg.r_pass;
  if (ctx.collided) r += cfg.terminal_collision;
  if (ctx.off_track) r += cfg.terminal_offtrack;
  return r;
}

double compute_shaped_reward(const TransitionContext& ctx, double d_front, double lambda_t,
                             const RewardConfig& cfg) {
  const double alpha_star = reference_gate(d_front, cfg);
  return compute_reward(ctx, cfg) - lambda_t * std::abs(ctx.alpha - alpha_star);
}

}  // namespace arbsim
