#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "codesign/feas/feasibility.hpp"
#include "codesign/sim/simulator.hpp"

namespace codesign::ctrl {

/// Gains of the attraction/repulsion whole-body controller. All positive;
/// bounds below define the tuning box.
struct ControllerGains {
  double base_gain = 1.4;       // 1/s, attraction toward the standoff point
  double standoff = 0.85;       // m, base keeps this distance behind the EE target
  double torso_gain = 1.8;      // 1/s, vertical EE error to torso velocity
  double ee_speed_scale = 0.65; // (0, 1], fraction of the nominal EE speed
  double repulse_gain = 0.5;    // obstacle repulsion strength
  double lookahead = 0.4;       // m, along-trajectory lookahead

  std::array<double, 6> as_array() const {
    return {base_gain, standoff, torso_gain, ee_speed_scale, repulse_gain, lookahead};
  }
  static ControllerGains from_array(const std::array<double, 6>& v);
  static const std::array<double, 6>& lower_bounds();
  static const std::array<double, 6>& upper_bounds();
  static const std::array<std::string, 6>& names();
  std::map<std::string, double> to_map() const;
};

/// One control tick: drives the base toward a standoff point behind the
/// lookahead EE target (with vortex repulsion from nearby occupied cells),
/// the torso toward the target height, and advances the EE reference at a
/// residual-gated speed.
sim::ControlCommand control_step(const sim::SimState& state, const sim::ControlContext& ctx,
                                 const ControllerGains& gains);

struct TunedPolicy {
  ControllerGains gains;
  int budget_consumed = 0;  // episodes
  double fitness = 0.0;
  /// Episode stream the final selection ran on; the returned gains scored
  /// at least as high as the initial mean on exactly these episodes.
  std::uint64_t selection_seed = 0;
  int selection_episodes = 0;
};

struct TunerConfig {
  int population = 8;
  double elite_fraction = 0.25;
  int max_iterations = 4;
  double init_std_fraction = 0.18;  // of each gain's range
  double std_floor_fraction = 0.05;
  sim::TaskSamplerConfig sampler;
  sim::SimOptions sim;
};

/// Cross-entropy search over controller gains under an episode budget:
/// iterations = min(max_iterations, budget / population), each candidate
/// evaluated on budget / (iterations * population) episodes with common
/// random numbers; returns the best candidate ever evaluated (the initial
/// mean is candidate zero). Throws BudgetTooSmall when budget < population.
TunedPolicy tune_policy(const model::RobotDescription& robot, const std::vector<sim::TaskId>& tasks,
                        int budget, std::uint64_t seed, const TunerConfig& config = {});

struct DesignScore {
  double score = 0.0;  // mean success rate over validation tasks, in [0, 1]
  std::map<std::string, double> per_task;  // task name -> success rate
  bool feasible = true;
  ControllerGains gains;
  int episodes_consumed = 0;
  int episodes_per_task = 0;
};

struct ScoreConfig {
  std::vector<sim::TaskId> train_tasks{sim::TaskId::RandomObstacle};
  std::vector<sim::TaskId> val_tasks{sim::TaskId::RandomGoal, sim::TaskId::Drawer};
  int val_episodes = 50;  // fresh episodes per validation task
  TunerConfig tuner;
  feas::FeasibilityOptions feasibility;
};

/// Full design evaluation: tipover feasibility gate, gain tuning on the
/// training tasks with the given budget, then the unweighted mean success
/// rate over fresh validation episodes. Infeasible designs score 0.
DesignScore score_design(const model::RobotDescription& robot, const model::DesignParams& omega,
                         int budget, std::uint64_t seed, const ScoreConfig& config = {});

/// Success rate of given gains on `episodes` fresh episodes of one task.
double evaluate_gains(const model::RobotDescription& robot, const ControllerGains& gains,
                      sim::TaskId task, int episodes, std::uint64_t seed,
                      const sim::TaskSamplerConfig& sampler, const sim::SimOptions& sim_options);

}  // namespace codesign::ctrl
