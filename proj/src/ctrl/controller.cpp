#include "codesign/ctrl/controller.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "codesign/common/errors.hpp"
#include "codesign/common/parallel.hpp"
#include "codesign/common/rng.hpp"

namespace codesign::ctrl {

using kin::wrap_angle;

ControllerGains ControllerGains::from_array(const std::array<double, 6>& v) {
  ControllerGains g;
  g.base_gain = v[0];
  g.standoff = v[1];
  g.torso_gain = v[2];
  g.ee_speed_scale = v[3];
  g.repulse_gain = v[4];
  g.lookahead = v[5];
  return g;
}

const std::array<double, 6>& ControllerGains::lower_bounds() {
  static const std::array<double, 6> lo = {0.2, 0.30, 0.2, 0.10, 0.0, 0.10};
  return lo;
}

const std::array<double, 6>& ControllerGains::upper_bounds() {
  static const std::array<double, 6> hi = {3.0, 1.20, 4.0, 1.00, 1.5, 1.00};
  return hi;
}

const std::array<std::string, 6>& ControllerGains::names() {
  static const std::array<std::string, 6> n = {"base_gain",      "standoff",     "torso_gain",
                                               "ee_speed_scale", "repulse_gain", "lookahead"};
  return n;
}

std::map<std::string, double> ControllerGains::to_map() const {
  std::map<std::string, double> m;
  const auto v = as_array();
  for (std::size_t i = 0; i < v.size(); ++i) m[names()[i]] = v[i];
  return m;
}

sim::ControlCommand control_step(const sim::SimState& state, const sim::ControlContext& ctx,
                                 const ControllerGains& gains) {
  sim::ControlCommand cmd;
  const double kMaxSpeed = 1.1;  // m/s, platform full speed
  const Eigen::Vector2d base_xy = state.base.head<2>();
  const double yaw = state.base.z();

  const double remaining = std::max(0.0, ctx.total_length - ctx.progress);
  // Look ahead along the trajectory only once the EE is tracking it; during
  // the approach the base positions for the first waypoint itself.
  const double ahead = state.tracking_active ? gains.lookahead : 0.0;
  const kin::Pose lookahead =
      ctx.trajectory->pose_at(std::min(ctx.total_length, ctx.progress + ahead));

  // Standoff point behind the lookahead target, on the base-to-target line,
  // pushed further back until the footprint disc is clear of obstacles.
  const Eigen::Vector2d target_xy = lookahead.position.head<2>();
  Eigen::Vector2d to_target = target_xy - base_xy;
  const double target_dist = to_target.norm();
  Eigen::Vector2d dir = target_dist > 1e-9
                            ? Eigen::Vector2d(to_target / target_dist)
                            : Eigen::Vector2d(std::cos(yaw), std::sin(yaw));
  const double kClearRadius = 0.67;  // footprint circumradius + margin
  Eigen::Vector2d standoff_point = target_xy - gains.standoff * dir;
  if (ctx.map) {
    for (int push = 0; push < 10; ++push) {
      if (ctx.map->occupied_near(standoff_point.x(), standoff_point.y(), kClearRadius).empty())
        break;
      standoff_point -= 0.12 * dir;
    }
  }
  // Transit attraction yields to the reach assist when the arm lags or the
  // base is already near its standoff: the base then slides to cancel the
  // arm's horizontal deficit instead of holding a fixed formation.
  const double lag = (ctx.desired.position - ctx.ee_world.position).norm();
  const double lag_scale = state.tracking_active ? std::max(0.0, 1.0 - lag / 0.08) : 1.0;
  const double near_scale =
      std::clamp((target_dist - gains.standoff) / 0.5, 0.25, 1.0);
  const double transit_scale = lag_scale * near_scale;
  // The assist time constant (~0.4 s) must outrun the reference speed or
  // motions coming at the robot (door swings) walk away from the arm.
  Eigen::Vector2d v_world =
      transit_scale * gains.base_gain * (standoff_point - base_xy) +
      2.5 * (ctx.desired.position.head<2>() - ctx.ee_world.position.head<2>());

  // Vortex repulsion from occupied cells near the base (radial push plus a
  // tangential component so head-on obstacles deflect rather than stall),
  // followed by a hard safety filter that cancels the remaining velocity
  // component toward the nearest cell once it nears the footprint edge.
  // Repulsion guides; the filter guarantees the controller never commands
  // straight into contact.
  if (ctx.map) {
    const double kRepulseRadius = 0.80;
    const auto cells = ctx.map->occupied_near(base_xy.x(), base_xy.y(), kRepulseRadius);
    if (!cells.empty()) {
      Eigen::Vector2d repulse(0, 0);
      Eigen::Vector2d nearest = cells.front();
      double weight_sum = 0.0;
      double d_min = 1e9;
      for (const auto& c : cells) {
        const Eigen::Vector2d diff = base_xy - c;
        const double d = std::max(diff.norm(), 1e-6);
        if (d < d_min) {
          d_min = d;
          nearest = c;
        }
        const double w = (kRepulseRadius - d) / kRepulseRadius;
        const Eigen::Vector2d radial = diff / d;
        const Eigen::Vector2d tangential(-radial.y(), radial.x());
        repulse += w * w * (radial + 0.6 * tangential);
        weight_sum += w * w;
      }
      if (gains.repulse_gain > 0.0 && weight_sum > 0.0) {
        Eigen::Vector2d v_rep = gains.repulse_gain * repulse / weight_sum;
        if (v_rep.norm() > kMaxSpeed) v_rep *= kMaxSpeed / v_rep.norm();
        v_world += v_rep;
      }
      const Eigen::Vector2d n = (base_xy - nearest) / std::max(d_min, 1e-6);
      const double inward = std::max(0.0, -v_world.dot(n));
      const double ramp = std::clamp((0.70 - d_min) / 0.08, 0.0, 1.0);
      v_world += n * inward * ramp;
    }
  }

  if (v_world.norm() > kMaxSpeed) v_world *= kMaxSpeed / v_world.norm();

  const double kMaxYawRate = 2.0;
  if (ctx.drive == model::DriveType::omni) {
    const Eigen::Rotation2Dd to_base(-yaw);
    cmd.base_twist.head<2>() = to_base.toRotationMatrix() * v_world;
    // Heading alignment only during the transit phase: an omnidirectional
    // base has no reason to rotate while the arm tracks, and doing so
    // sweeps the wrist orientation away at wz * arm extension.
    double wz = 0.0;
    if (!state.tracking_active && target_dist > 0.25 * gains.standoff)
      wz = 0.6 * gains.base_gain *
           wrap_angle(std::atan2(to_target.y(), to_target.x()) - yaw);
    cmd.base_twist.z() = std::clamp(wz, -kMaxYawRate, kMaxYawRate);
  } else {
    // Feedback linearization of a point 0.1 m ahead of the axle.
    const double kOffset = 0.1;
    const double c = std::cos(yaw), s = std::sin(yaw);
    const double v = c * v_world.x() + s * v_world.y();
    const double w = (-s * v_world.x() + c * v_world.y()) / kOffset;
    cmd.base_twist.x() = std::clamp(v, -kMaxSpeed, kMaxSpeed);
    cmd.base_twist.y() = 0.0;
    cmd.base_twist.z() = std::clamp(w, -kMaxYawRate, kMaxYawRate);
  }

  // Torso follows the vertical EE error.
  cmd.torso_velocity = gains.torso_gain * (ctx.desired.position.z() - ctx.ee_world.position.z());

  // EE reference speed: nominal, scaled, throttled by both tracking
  // residuals so the reference never outruns what the arm realizes. The
  // gates zero out inside the episode's failure thresholds (at 70% / 85%).
  const double rot_residual =
      kin::orientation_error(ctx.desired.orientation, ctx.ee_world.orientation).norm();
  double speed = remaining <= 1e-12
                     ? 0.0
                     : ctx.nominal_speed * gains.ee_speed_scale *
                           std::max(0.0, 1.0 - lag / (0.7 * ctx.max_trans_err)) *
                           std::max(0.0, 1.0 - rot_residual / (0.85 * ctx.max_rot_err));
  cmd.ee_speed = speed;
  return cmd;
}

double evaluate_gains(const model::RobotDescription& robot, const ControllerGains& gains,
                      sim::TaskId task, int episodes, std::uint64_t seed,
                      const sim::TaskSamplerConfig& sampler, const sim::SimOptions& sim_options) {
  if (episodes <= 0) return 0.0;
  int successes = 0;
  for (int e = 0; e < episodes; ++e) {
    const sim::TaskEpisode episode = sim::sample_episode(task, sampler, seed_mix(seed, e));
    const auto result = sim::run_episode(
        robot, episode,
        [&](const sim::SimState& s, const sim::ControlContext& c) {
          return control_step(s, c, gains);
        },
        sim_options);
    if (result.success) ++successes;
  }
  return static_cast<double>(successes) / static_cast<double>(episodes);
}

namespace {

struct CandidateFitness {
  double success = 0.0;
  double tiebreak = 0.0;  // negative mean tracking error
  double value() const { return success + 0.02 * tiebreak; }
};

CandidateFitness evaluate_candidate(const model::RobotDescription& robot,
                                    const ControllerGains& gains,
                                    const std::vector<sim::TaskId>& tasks, int episodes,
                                    std::uint64_t seed, const TunerConfig& config) {
  CandidateFitness fitness;
  double err_sum = 0.0;
  int successes = 0;
  for (int e = 0; e < episodes; ++e) {
    const sim::TaskId task = tasks[static_cast<std::size_t>(e) % tasks.size()];
    const sim::TaskEpisode episode =
        sim::sample_episode(task, config.sampler, seed_mix(seed, static_cast<std::uint64_t>(e)));
    const auto result = sim::run_episode(
        robot, episode,
        [&](const sim::SimState& s, const sim::ControlContext& c) {
          return control_step(s, c, gains);
        },
        config.sim);
    if (result.success) ++successes;
    err_sum += result.mean_trans_err;
  }
  fitness.success = static_cast<double>(successes) / static_cast<double>(episodes);
  fitness.tiebreak = -err_sum / static_cast<double>(episodes);
  return fitness;
}

}  // namespace

TunedPolicy tune_policy(const model::RobotDescription& robot, const std::vector<sim::TaskId>& tasks,
                        int budget, std::uint64_t seed, const TunerConfig& config) {
  if (tasks.empty()) throw BadParams("tune_policy needs at least one training task");
  if (budget < config.population)
    throw BudgetTooSmall("budget " + std::to_string(budget) + " is below the population size " +
                         std::to_string(config.population));

  // Split the budget so candidates see several episodes before the number
  // of refit iterations grows; a quarter is reserved to re-evaluate the
  // finalists on fresh episodes.
  const int iterations =
      std::max(1, std::min(config.max_iterations, budget / (12 * config.population)));
  const int episodes_per =
      std::max(1, (3 * budget / 4) / (iterations * config.population));
  const int elite =
      std::max(1, static_cast<int>(std::lround(config.population * config.elite_fraction)));

  const auto& lo = ControllerGains::lower_bounds();
  const auto& hi = ControllerGains::upper_bounds();
  std::array<double, 6> mean = ControllerGains{}.as_array();
  std::array<double, 6> stddev;
  for (std::size_t d = 0; d < 6; ++d) stddev[d] = config.init_std_fraction * (hi[d] - lo[d]);

  // Common random numbers: every candidate in every iteration sees the same
  // episode seeds, so fitness comparisons are paired.
  const std::uint64_t episode_seed = seed_mix(seed, 0xC3A5ULL);

  Rng rng(seed_mix(seed, 0x5EEDULL));
  ControllerGains best_gains = ControllerGains::from_array(mean);
  double best_value = -1e18;
  double best_success = 0.0;
  int consumed = 0;
  const std::array<double, 6> initial_mean = mean;
  std::vector<std::pair<double, std::array<double, 6>>> all_candidates;

  for (int iter = 0; iter < iterations; ++iter) {
    std::vector<std::array<double, 6>> population;
    population.reserve(static_cast<std::size_t>(config.population));
    for (int c = 0; c < config.population; ++c) {
      std::array<double, 6> g;
      if (iter == 0 && c == 0) {
        g = mean;  // the initial mean is always evaluated
      } else {
        for (std::size_t d = 0; d < 6; ++d)
          g[d] = std::clamp(rng.normal(mean[d], stddev[d]), lo[d], hi[d]);
      }
      population.push_back(g);
    }

    std::vector<CandidateFitness> fitness(population.size());
    parallel_for(population.size(), [&](std::size_t c) {
      fitness[c] = evaluate_candidate(robot, ControllerGains::from_array(population[c]), tasks,
                                      episodes_per, episode_seed, config);
    });
    consumed += episodes_per * config.population;

    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return fitness[a].value() > fitness[b].value();
    });

    if (fitness[order[0]].value() > best_value) {
      best_value = fitness[order[0]].value();
      best_success = fitness[order[0]].success;
      best_gains = ControllerGains::from_array(population[order[0]]);
    }
    for (std::size_t c = 0; c < population.size(); ++c)
      all_candidates.emplace_back(fitness[c].value(), population[c]);

    // Refit mean/std to the elite quartile.
    for (std::size_t d = 0; d < 6; ++d) {
      double m = 0.0;
      for (int e = 0; e < elite; ++e) m += population[order[static_cast<std::size_t>(e)]][d];
      m /= elite;
      double var = 0.0;
      for (int e = 0; e < elite; ++e) {
        const double diff = population[order[static_cast<std::size_t>(e)]][d] - m;
        var += diff * diff;
      }
      var /= elite;
      mean[d] = m;
      stddev[d] = std::max(std::sqrt(var), config.std_floor_fraction * (hi[d] - lo[d]));
    }
  }

  // Final selection: re-evaluate the top candidates plus the initial mean
  // on fresh common episodes with the reserved budget. Cuts the winner's
  // curse of picking on the tuning episodes alone.
  std::vector<std::array<double, 6>> finalists{initial_mean};
  std::stable_sort(all_candidates.begin(), all_candidates.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [value, gains] : all_candidates) {
    if (finalists.size() >= 4) break;
    bool duplicate = false;
    for (const auto& f : finalists) duplicate = duplicate || f == gains;
    if (!duplicate) finalists.push_back(gains);
  }
  const int reeval_eps = (budget - consumed) / static_cast<int>(finalists.size());
  std::uint64_t selection_seed = episode_seed;
  int selection_episodes = episodes_per;
  if (reeval_eps >= 1) {
    const std::uint64_t reeval_seed = seed_mix(seed, 0xF1A1ULL);
    std::vector<CandidateFitness> final_fitness(finalists.size());
    parallel_for(finalists.size(), [&](std::size_t c) {
      final_fitness[c] = evaluate_candidate(robot, ControllerGains::from_array(finalists[c]),
                                            tasks, reeval_eps, reeval_seed, config);
    });
    consumed += reeval_eps * static_cast<int>(finalists.size());
    std::size_t winner = 0;
    for (std::size_t c = 1; c < finalists.size(); ++c)
      if (final_fitness[c].value() > final_fitness[winner].value()) winner = c;
    best_gains = ControllerGains::from_array(finalists[winner]);
    best_success = final_fitness[winner].success;
    selection_seed = reeval_seed;
    selection_episodes = reeval_eps;
  }

  TunedPolicy tuned;
  tuned.gains = best_gains;
  tuned.budget_consumed = consumed;
  tuned.fitness = best_success;
  tuned.selection_seed = selection_seed;
  tuned.selection_episodes = selection_episodes;
  return tuned;
}

DesignScore score_design(const model::RobotDescription& robot, const model::DesignParams& omega,
                         int budget, std::uint64_t seed, const ScoreConfig& config) {
  DesignScore score;
  const feas::FeasibilityReport report = feas::check_design(robot, omega, config.feasibility);
  if (!report.statically_stable || !report.dynamically_stable) {
    score.feasible = false;
    score.score = 0.0;
    for (const auto task : config.val_tasks) score.per_task[sim::to_string(task)] = 0.0;
    return score;
  }

  const model::RobotDescription designed = model::apply_design(robot, omega);
  const TunedPolicy tuned = tune_policy(designed, config.train_tasks, budget,
                                        seed_mix(seed, 0x7A11ULL), config.tuner);
  score.gains = tuned.gains;
  score.episodes_consumed = tuned.budget_consumed;
  score.episodes_per_task = config.val_episodes;

  std::vector<double> rates(config.val_tasks.size(), 0.0);
  parallel_for(config.val_tasks.size(), [&](std::size_t t) {
    rates[t] = evaluate_gains(designed, tuned.gains, config.val_tasks[t], config.val_episodes,
                              seed_mix(seed, 0xEA70ULL + t), config.tuner.sampler, config.tuner.sim);
  });
  double sum = 0.0;
  for (std::size_t t = 0; t < config.val_tasks.size(); ++t) {
    score.per_task[sim::to_string(config.val_tasks[t])] = rates[t];
    sum += rates[t];
    score.episodes_consumed += config.val_episodes;
  }
  score.score = config.val_tasks.empty() ? 0.0 : sum / static_cast<double>(config.val_tasks.size());
  return score;
}

}  // namespace codesign::ctrl
