#include "arbsim/impairments.hpp"

#include <vector>

#include "arbsim/kernels.hpp"

namespace arbsim {

void apply_noise(LidarScan& scan, double sigma, Rng& rng) {
  if (sigma <= 0.0) return;
  for (double& r : scan.ranges) r += rng.normal(0.0, sigma);
  kernels::clamp_ranges(scan.ranges, scan.meta.range_min, scan.meta.range_max);
}

void apply_outliers(LidarScan& scan, const ImpairmentConfig& cfg, Rng& rng) {
  if (cfg.p_out <= 0.0) return;
  if (!rng.bernoulli(cfg.p_out)) return;
  const auto [lo, hi] = scan.cone_indices(-cfg.cone / 2, cfg.cone / 2);
  const int cone_beams = hi - lo + 1;
  const int k = static_cast<int>(cfg.f_out * cone_beams);
  if (k <= 0) return;
  // partial Fisher-Yates draw of k distinct cone beams
  std::vector<int> idx(cone_beams);
  for (int i = 0; i < cone_beams; ++i) idx[i] = lo + i;
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.uniform_int(cone_beams - i));
    std::swap(idx[i], idx[j]);
    scan.ranges[idx[i]] = cfg.r_out;
  }
  kernels::clamp_ranges(scan.ranges, scan.meta.range_min, scan.meta.range_max);
}

std::optional<LidarScan> impair_stream(const LidarScan& scan, double now,
                                       const ImpairmentConfig& cfg, ImpairmentState& state) {
  // corrupt, then queue; the dropout draw is attached at enqueue time so the
  // stream is a pure function of (seed, input order)
  ImpairmentState::Queued q;
  q.scan = scan;
  apply_noise(q.scan, cfg.noise_sigma, state.rng);
  apply_outliers(q.scan, cfg, state.rng);
  q.due = scan.stamp + cfg.delay;
  q.dropped = cfg.p_drop > 0.0 && state.rng.bernoulli(cfg.p_drop);
  state.fifo.push_back(std::move(q));

  while (!state.fifo.empty() && state.fifo.front().due <= now + 1e-12) {
    ImpairmentState::Queued due = std::move(state.fifo.front());
    state.fifo.pop_front();
    // dropped scans republish the previous valid delivery (zero-order hold);
    // the very first delivery always seeds the hold
    if (!due.dropped || !state.last_valid.has_value()) state.last_valid = std::move(due.scan);
  }
  return state.last_valid;
}

}  // namespace arbsim
