#pragma once

#include <vector>

#include "arbsim/arbiter.hpp"
#include "arbsim/bus.hpp"
#include "arbsim/observation.hpp"
#include "arbsim/raceline.hpp"
#include "arbsim/types.hpp"

namespace arbsim {

struct SamplingMpcConfig {
  int horizon = 8;          // N
  double dt = 0.1;          // s
  int m_standard = 9;       // candidates, standard tracking
  int m_interaction = 17;   // candidates, interaction
  double span_standard = 0.2;       // rad, fan half-width around the center
  double span_interaction = 0.4189; // rad, full-limit avoidance fan
  double r_safe = 0.55;     // m, clearance screening radius

  // mode-dependent cost weights
  double w_trk_standard = 1.0;
  double w_delta_standard = 0.1;
  double w_prog_standard = 0.5;
  double w_obs_standard = 0.5;
  double w_trk_interaction = 0.0;
  double w_delta_interaction = 0.05;
  double w_prog_interaction = 1.0;
  double w_obs_interaction = 8.0;

  double phi_onset = 1.5;   // m, obstacle-term onset: Phi(c) = max(0, onset - c)^2
  double j_penalty = 1e6;   // cost assigned to infeasible candidates

  // Rollout/command speed: the reference profile during standard tracking;
  // during interaction it scales with the room along the chosen free
  // direction, clamp(range - r_safe, floor, ref), so a blocked vehicle slows
  // while a clear side line runs at the profile speed.
  double speed_floor_interaction = 0.5;  // m/s
  double scan_point_eps = 1e-6;          // beams below r_max - eps become obstacle points

  InteractionConfig interaction;  // same automaton thresholds as the arbiter
};

struct CandidateTrajectory {
  double steering = 0.0;
  double speed = 0.0;
  std::vector<Vec2> points;  // p_0..p_N, world frame
  double c_min = 0.0;
  bool feasible = false;
  double cost = 0.0;
};

// M evenly spaced steering angles centred on `center`, clipped to the limits
std::vector<double> generate_candidates(bool interaction_mode, double center,
                                        const SamplingMpcConfig& cfg,
                                        const VehicleParams& params);

// constant-steering kinematic rollout (no actuator lag) at constant speed
CandidateTrajectory rollout(const VehicleState& state, double steering, double speed,
                            const SamplingMpcConfig& cfg, const VehicleParams& params);

struct FreeDirection {
  double steering = 0.0;  // clamped to the steering limits
  double range = 0.0;     // smoothed range along that direction
};

// freest forward direction of the smoothed scan, used as the interaction-mode
// candidate center; side > 0 restricts the search to the left half-sector,
// side < 0 to the right, 0 searches the full sector
FreeDirection free_space_center(const LidarScan& scan, double ref_center, int side,
                                const VehicleParams& params);

// scan returns rendered as world-frame points from the current ego pose
std::vector<Vec2> scan_to_points(const LidarScan& scan, const VehicleState& ego, double eps);

// conservative clearance screen: min distance from any predicted point to any
// scan return; feasible iff >= r_safe. Sets traj.c_min / traj.feasible.
void screen_clearance(CandidateTrajectory& traj, const std::vector<Vec2>& scan_points,
                      const SamplingMpcConfig& cfg);

// J = w_trk sum |p_k - ref_k|^2 + w_delta delta^2 - w_prog prog + w_obs Phi(c_min);
// infeasible candidates get j_penalty instead
double candidate_cost(const CandidateTrajectory& traj, const Raceline& line, double s0,
                      const SamplingMpcConfig& cfg, bool interaction_mode);

struct MpcDiag {
  bool interaction = false;
  double center = 0.0;
  std::vector<CandidateTrajectory> candidates;
  int selected = -1;  // -1 when every candidate is infeasible
};

// Receding-horizon step: mode detection, candidate fan, rollouts, clearance
// screening, cost argmin, first-step command. Emits a stop when every
// candidate fails the screen.
class SamplingMpc {
 public:
  SamplingMpc(const SamplingMpcConfig& cfg, const ObservationConfig& obs_cfg,
              const VehicleParams& params)
      : cfg_(cfg), obs_cfg_(obs_cfg), params_(params) {}

  void reset();
  AckermannCommand step(const MessageBus& bus, const Raceline& line, double now,
                        MpcDiag* diag = nullptr);

 private:
  SamplingMpcConfig cfg_;
  ObservationConfig obs_cfg_;
  VehicleParams params_;
  InteractionDetector detector_;
  int side_latch_ = 0;  // avoidance side held while interaction is active
};

}  // namespace arbsim
