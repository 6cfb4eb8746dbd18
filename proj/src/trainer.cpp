#include "arbsim/trainer.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "arbsim/arbiter.hpp"
#include "arbsim/bicycle.hpp"
#include "arbsim/errors.hpp"
#include "arbsim/lidar.hpp"

namespace arbsim {

TrainEnv::TrainEnv(const ScenarioConfig& scenario, const World& world)
    : sc_(scenario),
      world_(&world),
      ego_tracker_(world.raceline),
      opp_tracker_(world.raceline),
      spawn_rng_(0) {
  sc_.impairments = ImpairmentConfig{};
  sc_.impairments.noise_sigma = 0.0;
  sc_.impairments.delay = 0.0;
  sc_.impairments.p_drop = 0.0;
  sc_.impairments.p_out = 0.0;
  max_steps_ = static_cast<int>(std::ceil(sc_.timeout / sc_.control_period()));
}

Observation TrainEnv::reset(uint64_t episode_seed) {
  spawn_rng_.reseed(mix_seed(episode_seed, 11));
  const double s_ego =
      sc_.spawn.ego_arclength + spawn_rng_.uniform(0.0, sc_.spawn.ego_jitter);
  const Vec2 p = world_->raceline.point_at(s_ego);
  ego_ = {p.x, p.y, world_->raceline.tangent_heading_at(s_ego), 0.0, 0.0};
  const double gap = spawn_rng_.uniform(sc_.spawn.gap_min, sc_.spawn.gap_max);
  const double s_opp = s_ego + gap;
  const Vec2 q = world_->raceline.point_at(s_opp);
  opp_ = {q.x, q.y, world_->raceline.tangent_heading_at(s_opp), 0.0, 0.0};

  ego_tracker_.reset(ego_.pos());
  opp_tracker_.reset(opp_.pos());
  start_progress_ = ego_tracker_.progress();
  alpha_prev_ = 0.0;
  now_ = 0.0;
  step_count_ = 0;
  pass_armed_ = false;
  pass_completed_ = false;
  done_ = false;

  const ObstacleDisk disk{opp_.pos(), sc_.vehicle.collision_radius};
  scan_ = simulate_lidar(ego_, world_->track, std::span(&disk, 1), sc_.lidar, now_);
  return observe();
}

Observation TrainEnv::observe() const {
  return build_observation(ego_, world_->raceline, scan_, &opp_, sc_.observation);
}

double TrainEnv::episode_progress() const {
  return ego_tracker_.progress() - start_progress_;
}

TrainEnv::StepResult TrainEnv::step(double alpha) {
  if (done_) throw ConfigError("TrainEnv::step called on a finished episode");
  StepResult res;
  alpha = clamp(alpha, 0.0, 1.0);

  const AckermannCommand u_pp =
      pure_pursuit(ego_, world_->raceline, sc_.pure_pursuit, sc_.vehicle);
  const GapFollowResult gf = gap_follow(scan_, sc_.gap_follow, sc_.vehicle);
  const AckermannCommand cmd = fuse(u_pp, gf.cmd, alpha, sc_.vehicle);

  AckermannCommand opp_cmd =
      pure_pursuit(opp_, world_->raceline, sc_.pure_pursuit, sc_.vehicle);
  opp_cmd.speed *= sc_.opponent_speed_factor;
  opp_cmd = saturate(opp_cmd, sc_.vehicle);

  const double sub_dt = sc_.control_period() / sc_.physics_substeps;
  const double prog_before = ego_tracker_.progress();
  for (int j = 0; j < sc_.physics_substeps && !res.collided && !res.off_track; ++j) {
    ego_ = step_bicycle(ego_, cmd, sc_.vehicle, sub_dt);
    opp_ = step_bicycle(opp_, opp_cmd, sc_.vehicle, sub_dt);
    if ((ego_.pos() - opp_.pos()).norm() < 2.0 * sc_.vehicle.collision_radius)
      res.collided = true;
    else if (world_->track.disk_hits_wall(ego_.pos(), sc_.vehicle.collision_radius))
      res.off_track = true;
  }
  now_ += sc_.control_period();
  ++step_count_;

  const double prog = ego_tracker_.update(ego_.pos());
  opp_tracker_.update(opp_.pos());

  const double rel = wrap_s_diff(world_->raceline.nearest_arclength(ego_.pos()) -
                                     world_->raceline.nearest_arclength(opp_.pos()),
                                 world_->raceline.total_length());
  if (rel < -sc_.pass_rearm) pass_armed_ = true;
  if (pass_armed_ && rel > sc_.pass_margin && !res.collided && !res.off_track) {
    pass_armed_ = false;
    pass_completed_ = true;
    res.pass_event = true;
  }

  double c_true = sc_.lidar.range_max;
  if (!res.off_track) {
    const ObstacleDisk disk{opp_.pos(), sc_.vehicle.collision_radius};
    scan_ = simulate_lidar(ego_, world_->track, std::span(&disk, 1), sc_.lidar, now_);
    c_true = front_clearance_min(scan_, sc_.safety.front_cone);
  }

  TransitionContext ctx;
  ctx.progress_delta = prog - prog_before;
  ctx.speed = ego_.speed;
  ctx.alpha = alpha;
  ctx.alpha_prev = alpha_prev_;
  ctx.clearance = c_true;
  ctx.pass_event = res.pass_event;
  ctx.collided = res.collided;
  ctx.off_track = res.off_track;
  res.reward = compute_reward(ctx, sc_.reward);
  alpha_prev_ = alpha;

  res.obs = observe();
  res.d_front = res.obs.d_front;
  res.done = res.collided || res.off_track || step_count_ >= max_steps_;
  done_ = res.done;
  return res;
}

EvalPoint evaluate_policy(const GatePolicy& policy, const ScenarioConfig& scenario,
                          const World& world, int episodes, uint64_t seed_base, long step) {
  EvalPoint pt;
  pt.step = step;
  double reward_sum = 0.0;
  int successes = 0;
  for (int e = 0; e < episodes; ++e) {
    TrainEnv env(scenario, world);
    Observation obs = env.reset(mix_seed(seed_base, static_cast<uint64_t>(e)));
    double total = 0.0;
    for (;;) {
      const GateOutput g = policy.forward(obs);
      const TrainEnv::StepResult res = env.step(g.alpha);
      total += res.reward;
      obs = res.obs;
      if (res.done) break;
    }
    reward_sum += total;
    if (env.episode_succeeded()) ++successes;
  }
  pt.mean_reward = reward_sum / episodes;
  pt.success_rate = static_cast<double>(successes) / episodes;
  return pt;
}

TrainResult train(const ScenarioConfig& scenario, const World& world,
                  const PpoHyperparams& hp, const TrainOptions& opts) {
  GatePolicy policy(Observation::kDim, {64, 64}, mix_seed(opts.seed, 101));
  AdamOptimizer adam;
  Rng action_rng(mix_seed(opts.seed, 202));
  Rng mask_rng(mix_seed(opts.seed, 303));
  Rng shuffle_rng(mix_seed(opts.seed, 404));
  const uint64_t eval_seed_base = mix_seed(opts.seed, 505);
  const double p_mask_train = 0.3;

  MaskConfig mask_cfg;
  mask_cfg.p_mask = p_mask_train;
  mask_cfg.fill = scenario.observation;

  TrainEnv env(scenario, world);
  uint64_t episode_counter = 0;
  Observation obs_raw = env.reset(mix_seed(opts.seed, episode_counter++));
  bool need_reset = false;

  std::ofstream log;
  TrainResult result;
  result.best_policy = policy;
  result.final_policy = policy;
  if (!opts.out_dir.empty()) {
    std::filesystem::create_directories(opts.out_dir);
    result.log_path = opts.out_dir + "/training_log.csv";
    log.open(result.log_path);
    log << "step,eval_mean_reward,eval_success_rate,pg_loss,v_loss,entropy,approx_kl,lr,"
           "lambda_shaping\n";
  }

  auto normalized = [&policy](const Observation& o, bool update) {
    const auto arr = o.to_array();
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(arr.data(), arr.size());
    if (update) policy.normalizer().update(x);
    return policy.normalizer().normalize(x);
  };

  double best_eval = -std::numeric_limits<double>::infinity();
  long global_step = 0;
  long next_eval = hp.eval_every;
  long next_ckpt = hp.checkpoint_every;
  PpoUpdateStats last_update;

  while (global_step < hp.total_steps) {
    RolloutBuffer buffer;
    Eigen::VectorXd last_obs_norm;
    bool last_done = false;
    for (int t = 0; t < hp.n_steps; ++t) {
      if (need_reset) {
        obs_raw = env.reset(mix_seed(opts.seed, episode_counter++));
        need_reset = false;
      }
      const Observation masked =
          mask_opponent(obs_raw, !mask_rng.bernoulli(p_mask_train), mask_cfg);
      const Eigen::VectorXd obs_norm = normalized(masked, /*update=*/true);
      const double z = policy.sample_z(obs_norm, action_rng);
      const double logp = policy.log_prob(obs_norm, z);
      const double value = policy.value(obs_norm);
      const double alpha = sigmoid(z);

      const TrainEnv::StepResult res = env.step(alpha);
      const double lambda_t = shaping_weight(global_step, hp.total_steps, scenario.reward);
      const double reward =
          res.reward - lambda_t * std::abs(alpha - reference_gate(res.d_front, scenario.reward));

      buffer.push(obs_norm, z, logp, value, reward, res.done);
      obs_raw = res.obs;
      need_reset = res.done;
      last_done = res.done;
      ++global_step;
    }
    {
      const Observation masked = mask_opponent(obs_raw, true, mask_cfg);
      last_obs_norm = normalized(masked, /*update=*/false);
    }
    const double bootstrap = last_done ? 0.0 : policy.value(last_obs_norm);
    buffer.finish(bootstrap, hp.gamma, hp.gae_lambda);

    const double lr = hp.lr_at(global_step);
    last_update = ppo_update(policy, adam, buffer, hp, lr, shuffle_rng);

    while (next_eval <= global_step) {
      const EvalPoint pt = evaluate_policy(policy, scenario, world, hp.eval_episodes,
                                           eval_seed_base, next_eval);
      result.evals.push_back(pt);
      if (log.is_open()) {
        log << pt.step << "," << pt.mean_reward << "," << pt.success_rate << ","
            << last_update.pg_loss << "," << last_update.v_loss << "," << last_update.entropy
            << "," << last_update.approx_kl << "," << lr << ","
            << shaping_weight(global_step, hp.total_steps, scenario.reward) << "\n";
        log.flush();
      }
      if (pt.mean_reward > best_eval) {
        best_eval = pt.mean_reward;
        result.best_policy = policy;
        if (!opts.out_dir.empty()) {
          result.best_checkpoint = opts.out_dir + "/policy_best.ckpt";
          policy.save(result.best_checkpoint);
        }
      }
      if (opts.progress_every > 0)
        std::fprintf(stderr, "[train] step %ld eval reward %.3f success %.2f\n", pt.step,
                     pt.mean_reward, pt.success_rate);
      next_eval += hp.eval_every;
    }
    while (next_ckpt <= global_step) {
      if (!opts.out_dir.empty())
        policy.save(opts.out_dir + "/policy_step" + std::to_string(next_ckpt) + ".ckpt");
      next_ckpt += hp.checkpoint_every;
    }
  }

  result.final_policy = policy;
  if (!opts.out_dir.empty()) {
    result.final_checkpoint = opts.out_dir + "/policy_final.ckpt";
    policy.save(result.final_checkpoint);
    if (result.best_checkpoint.empty()) {
      result.best_checkpoint = opts.out_dir + "/policy_best.ckpt";
      result.best_policy.save(result.best_checkpoint);
    }
  }
  return result;
}

}  // namespace arbsim
