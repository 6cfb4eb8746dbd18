#pragma once

#include "arbsim/types.hpp"

namespace arbsim {

// Kinematic bicycle step. Actuators first move toward the command under a
// first-order lag (exact discretization; tau <= 0 snaps instantly), then the
// pose integrates with the updated actuator values:
//   x += v cos(heading) dt,  y += v sin(heading) dt,
//   heading += (v / L) tan(steering) dt, renormalized to (-pi, pi].
// The command is expected to be saturated already.
VehicleState step_bicycle(const VehicleState& state, const AckermannCommand& cmd,
                          const VehicleParams& params, double dt);

}  // namespace arbsim
