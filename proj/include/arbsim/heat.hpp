#pragma once

#include <memory>
#include <string>
#include <vector>

#include "arbsim/gate_policy.hpp"
#include "arbsim/scenario.hpp"

namespace arbsim {

enum class HeatOutcome { success, collision, offtrack, timeout };
const char* to_string(HeatOutcome o);
HeatOutcome outcome_from_string(const std::string& s);

struct HeatEvent {
  int step = 0;
  std::string type;   // "pass", "override", "interaction_on", "interaction_off", "error"
  std::string detail;

  bool operator==(const HeatEvent&) const = default;
};

struct HeatRecord {
  std::string method;
  double p_out = 0.0;
  uint64_t seed = 0;
  int heat_index = 0;

  HeatOutcome outcome = HeatOutcome::timeout;
  bool pass_completed = false;
  bool unsafe_flag = false;
  bool crashed = false;  // heat raised an error; recorded, never dropped
  double sim_duration = 0.0;
  int control_steps = 0;
  double min_clearance = 0.0;
  double max_cross_track = 0.0;
  std::vector<double> clearance_trace;  // true front-sector clearance per step
  std::vector<HeatEvent> events;
  std::vector<double> runtime_ms;  // wall-clock; exempt from determinism

  // bitwise equality of everything except the wall-clock runtime samples
  bool deterministic_equal(const HeatRecord& o) const;

  std::string to_jsonl() const;
  static HeatRecord from_jsonl(const std::string& line);
};

struct ControllerDiag {
  bool interaction = false;
  bool overridden = false;
  std::string override_reason;
  double alpha_exec = 0.0;
};

// One high-level controller drives the ego per heat; only one is ever active.
class HighLevelController {
 public:
  virtual ~HighLevelController() = default;
  virtual std::string name() const = 0;
  virtual void reset(uint64_t seed) = 0;
  virtual AckermannCommand step(const MessageBus& bus, const Raceline& line, double now,
                                ControllerDiag* diag) = 0;
};

std::unique_ptr<HighLevelController> make_arbiter_controller(const ScenarioConfig& scenario,
                                                             GatePolicy policy);
std::unique_ptr<HighLevelController> make_mpc_controller(const ScenarioConfig& scenario);
// pure-pursuit-only ego, used for unobstructed tracking checks
std::unique_ptr<HighLevelController> make_pure_pursuit_controller(
    const ScenarioConfig& scenario);

// Fixed-rate closed-loop episode: simulate, impair, control, integrate, score.
// Fully reproducible from (scenario, seed, heat_index); wall-clock runtime
// samples are the only nondeterministic fields.
HeatRecord run_heat(const ScenarioConfig& scenario, const World& world,
                    HighLevelController& controller, uint64_t seed, int heat_index);

}  // namespace arbsim
