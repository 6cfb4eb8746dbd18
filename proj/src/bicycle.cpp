#include "arbsim/bicycle.hpp"

namespace arbsim {

namespace {
double lag_toward(double current, double target, double tau, double dt) {
  if (tau <= 0.0) return target;
  const double a = 1.0 - std::exp(-dt / tau);
  return current + (target - current) * a;
}
}  // namespace

VehicleState step_bicycle(const VehicleState& state, const AckermannCommand& cmd,
                          const VehicleParams& params, double dt) {
  VehicleState next = state;
  next.steering = lag_toward(state.steering, cmd.steering, params.steer_tau, dt);
  next.speed = lag_toward(state.speed, cmd.speed, params.speed_tau, dt);
  if (next.speed < 0.0) next.speed = 0.0;

  next.x = state.x + next.speed * std::cos(state.heading) * dt;
  next.y = state.y + next.speed * std::sin(state.heading) * dt;
  const double dh = next.speed / params.wheelbase * std::tan(next.steering) * dt;
  next.heading = dh == 0.0 ? state.heading : wrap_angle(state.heading + dh);
  return next;
}

}  // namespace arbsim
