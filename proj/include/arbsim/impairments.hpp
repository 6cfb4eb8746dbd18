#pragma once

#include <deque>
#include <optional>

#include "arbsim/rng.hpp"
#include "arbsim/types.hpp"

namespace arbsim {

struct ImpairmentConfig {
  double noise_sigma = 0.05;   // m, additive zero-mean Gaussian range noise
  double delay = 0.200;        // s, scan delay through a FIFO queue
  double p_drop = 0.3;         // per-scan dropout probability (zero-order hold)
  double p_out = 0.0;          // per-scan probability of the outlier burst
  double f_out = 0.12;         // fraction of forward-cone beams set to r_out
  double r_out = 0.10;         // m, false short-range value
  double cone = deg2rad(40.0); // symmetric forward fov for outlier injection
  uint64_t seed = 0;
  // optional opponent-odometry delay hook; disabled by default and unexercised
  bool odom_delay_enabled = false;
  double odom_delay = 0.0;

  bool enabled() const {
    return noise_sigma > 0.0 || delay > 0.0 || p_drop > 0.0 || p_out > 0.0;
  }
};

// Per-heat pipeline state: the delay FIFO, the last scan that survived the
// dropout draw, and the impairment RNG stream.
struct ImpairmentState {
  struct Queued {
    LidarScan scan;
    double due = 0.0;
    bool dropped = false;
  };
  std::deque<Queued> fifo;
  std::optional<LidarScan> last_valid;
  Rng rng;

  void reset(uint64_t seed) {
    fifo.clear();
    last_valid.reset();
    rng.reseed(seed);
  }
};

// per-beam Gaussian perturbation, then clipping to sensor limits
void apply_noise(LidarScan& scan, double sigma, Rng& rng);

// with probability p_out: floor(f_out * cone beams) distinct forward-cone
// beams forced to r_out, then clipped to sensor limits
void apply_outliers(LidarScan& scan, const ImpairmentConfig& cfg, Rng& rng);

// full pipeline for one control tick: corrupt the freshly captured scan,
// enqueue it at stamp + delay, then deliver the newest due scan (or hold the
// previous valid one when the dropout draw fired). Returns nothing until the
// first scan clears the queue. Delivered scans keep their capture stamps.
std::optional<LidarScan> impair_stream(const LidarScan& scan, double now,
                                       const ImpairmentConfig& cfg, ImpairmentState& state);

}  // namespace arbsim
