#include "codesign/sim/simulator.hpp"

#include <cmath>

#include "codesign/common/errors.hpp"

namespace codesign::sim {

std::string to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::none: return "none";
    case FailureKind::collision: return "collision";
    case FailureKind::joint_limit: return "joint_limit";
    case FailureKind::tracking_exceeded: return "tracking_exceeded";
    case FailureKind::horizon: return "horizon";
  }
  return "?";
}

namespace {

/// V(a) = [[sin a / a, (cos a - 1)/a], [(1 - cos a)/a, sin a / a]] with the
/// small-angle series; the displacement map of the SE(2) exponential.
Eigen::Matrix2d se2_v(double a) {
  double s, c1;
  if (std::abs(a) < 1e-8) {
    s = 1.0 - a * a / 6.0;
    c1 = a / 2.0 - a * a * a / 24.0;
  } else {
    s = std::sin(a) / a;
    c1 = (1.0 - std::cos(a)) / a;
  }
  Eigen::Matrix2d V;
  V << s, -c1, c1, s;
  return V;
}

}  // namespace

Eigen::Vector3d constant_twist_pose(const Eigen::Vector3d& start, const Eigen::Vector3d& twist,
                                    double t) {
  const double a = twist.z() * t;
  Eigen::Rotation2Dd R(start.z());
  const Eigen::Vector2d d = R.toRotationMatrix() * (se2_v(a) * (twist.head<2>() * t));
  return {start.x() + d.x(), start.y() + d.y(), start.z() + a};
}

Simulator::Simulator(const model::RobotDescription& robot, const TaskEpisode& episode,
                     const SimOptions& options)
    : kin_(robot),
      drive_(robot.drive),
      footprint_(robot.footprint.half_extents),
      map_(episode.map),
      start_base_(episode.start_base),
      ee_radius_(options.ee_radius) {
  // Torso: the first prismatic dof outside the arm subtree; arm: everything
  // downstream of the arm mount hook.
  const auto& desc = kin_.robot();
  const int arm_hook = desc.joint_index(desc.hooks.arm);
  std::vector<bool> arm_side(desc.links.size(), false);
  arm_side[static_cast<std::size_t>(desc.link_index(desc.joint(arm_hook).child))] = true;
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& j : desc.joints) {
      const int pi = desc.link_index(j.parent), ci = desc.link_index(j.child);
      if (arm_side[static_cast<std::size_t>(pi)] && !arm_side[static_cast<std::size_t>(ci)]) {
        arm_side[static_cast<std::size_t>(ci)] = true;
        grew = true;
      }
    }
  }
  const auto& actuated = desc.actuated_joints();
  for (std::size_t i = 0; i < actuated.size(); ++i) {
    const auto& j = desc.joint(actuated[i]);
    const bool on_arm = arm_side[static_cast<std::size_t>(desc.link_index(j.child))];
    if (on_arm)
      arm_dofs_.push_back(static_cast<int>(i));
    else if (j.type == model::JointType::prismatic && torso_dof_ < 0)
      torso_dof_ = static_cast<int>(i);
  }
  arm_params_.joints = arm_dofs_;
  arm_params_.clamp_to_limits = true;
  arm_params_.rotation_weight = 0.5;
}

SimState Simulator::initial_state() const {
  SimState state;
  state.base = start_base_;
  state.q = kin_.neutral_config();
  return state;
}

kin::Pose Simulator::ee_world_pose(const SimState& state) const {
  Eigen::Isometry3d T_base = Eigen::Isometry3d::Identity();
  T_base.translation() = Eigen::Vector3d(state.base.x(), state.base.y(), 0.0);
  T_base.rotate(Eigen::AngleAxisd(state.base.z(), Eigen::Vector3d::UnitZ()));
  return kin::Pose::from_isometry(T_base * kin_.ee_pose(state.q).to_isometry());
}

bool Simulator::base_collides(const SimState& state) const {
  return map_.footprint_collides(state.base.x(), state.base.y(), state.base.z(), footprint_);
}

std::optional<FailureKind> Simulator::step(SimState& state, const ControlCommand& cmd,
                                           const kin::Pose& ee_target, double dt) {
  if (dt <= 0) throw BadParams("dt must be positive");
  if (!kin_.within_limits(state.q, 1e-9)) return FailureKind::joint_limit;

  Eigen::Vector3d twist = cmd.base_twist;
  if (drive_ == model::DriveType::differential) twist.y() = 0.0;  // unicycle projection
  state.base = constant_twist_pose(state.base, twist, dt);

  if (torso_dof_ >= 0) {
    const auto& desc = kin_.robot();
    const double vmax = desc.joint(desc.actuated_joints()[static_cast<std::size_t>(torso_dof_)]).vel_limit;
    const double v = std::clamp(cmd.torso_velocity, -vmax, vmax);
    state.q[torso_dof_] = std::clamp(state.q[torso_dof_] + v * dt,
                                     kin_.lower_limits()[torso_dof_],
                                     kin_.upper_limits()[torso_dof_]);
  }

  // One DLS step of the arm toward the target, expressed in the base frame;
  // per-iteration step clamped to each joint's velocity limit.
  Eigen::Isometry3d T_base = Eigen::Isometry3d::Identity();
  T_base.translation() = Eigen::Vector3d(state.base.x(), state.base.y(), 0.0);
  T_base.rotate(Eigen::AngleAxisd(state.base.z(), Eigen::Vector3d::UnitZ()));
  kin::Pose target_local = kin::Pose::from_isometry(T_base.inverse() * ee_target.to_isometry());
  kin::IkParams params = arm_params_;
  double min_step = 1e9;
  const auto& desc = kin_.robot();
  for (int d : arm_dofs_) {
    const double v = desc.joint(desc.actuated_joints()[static_cast<std::size_t>(d)]).vel_limit;
    min_step = std::min(min_step, v * dt);
  }
  params.step_clamp = min_step;
  kin_.dls_step(state.q, target_local, params);

  state.time += dt;

  if (base_collides(state)) return FailureKind::collision;
  const kin::Pose ee = ee_world_pose(state);
  if (map_.disc_collides(ee.position.x(), ee.position.y(), ee.position.z(), ee_radius_))
    return FailureKind::collision;

  state.cum_trans_err += (ee.position - ee_target.position).norm();
  state.cum_rot_err += kin::orientation_error(ee_target.orientation, ee.orientation).norm();
  state.err_samples += 1;
  return std::nullopt;
}

EpisodeResult run_episode(const model::RobotDescription& robot, const TaskEpisode& episode,
                          const ControlPolicy& policy, const SimOptions& options) {
  Simulator sim(robot, episode, options);
  SimState state = sim.initial_state();
  EpisodeResult result;

  const double total = episode.trajectory.length();
  bool door_opened = false;

  auto finish = [&](bool success, FailureKind failure, int steps) {
    result.success = success;
    result.failure = failure;
    result.steps = steps;
    result.sim_time = state.time;
    if (state.err_samples > 0) {
      result.mean_trans_err = state.cum_trans_err / static_cast<double>(state.err_samples);
      result.mean_rot_err = state.cum_rot_err / static_cast<double>(state.err_samples);
    }
    return result;
  };

  if (sim.base_collides(state)) return finish(false, FailureKind::collision, 0);

  {
    // A zero-length trajectory from a feasible start succeeds immediately.
    const kin::Pose ee = sim.ee_world_pose(state);
    const kin::Pose goal = episode.trajectory.pose_at(total);
    if (total <= 1e-12 &&
        (ee.position - goal.position).norm() <= episode.max_trans_err &&
        kin::orientation_error(goal.orientation, ee.orientation).norm() <= episode.max_rot_err)
      return finish(true, FailureKind::none, 0);
  }

  for (int step_i = 1; step_i <= episode.horizon; ++step_i) {
    ControlContext ctx;
    ctx.map = &sim.map();
    ctx.trajectory = &episode.trajectory;
    ctx.progress = state.progress;
    ctx.total_length = total;
    ctx.desired = episode.trajectory.pose_at(state.progress);
    ctx.ee_world = sim.ee_world_pose(state);
    ctx.nominal_speed = episode.trajectory.speed;
    ctx.dt = options.dt;
    ctx.max_trans_err = episode.max_trans_err;
    ctx.max_rot_err = episode.max_rot_err;
    ctx.drive = robot.drive;

    const ControlCommand cmd = policy(state, ctx);
    if (auto failure = sim.step(state, cmd, ctx.desired, options.dt))
      return finish(false, *failure, step_i);

    const kin::Pose ee = sim.ee_world_pose(state);
    const kin::Pose desired = episode.trajectory.pose_at(state.progress);
    const double e_p = (ee.position - desired.position).norm();
    const double e_r = kin::orientation_error(desired.orientation, ee.orientation).norm();

    if (!state.tracking_active && e_p <= 0.5 * episode.max_trans_err &&
        e_r <= 0.5 * episode.max_rot_err)
      state.tracking_active = true;

    if (state.tracking_active) {
      if (e_p > episode.max_trans_err || e_r > episode.max_rot_err)
        return finish(false, FailureKind::tracking_exceeded, step_i);
      state.progress = std::min(total, state.progress + cmd.ee_speed * options.dt);
      if (episode.door_open_fraction >= 0.0 && !door_opened && total > 0 &&
          state.progress / total >= episode.door_open_fraction) {
        sim.open_door();
        door_opened = true;
      }
      if (state.progress >= total - 1e-9) {
        const kin::Pose goal = episode.trajectory.pose_at(total);
        const double g_p = (ee.position - goal.position).norm();
        const double g_r = kin::orientation_error(goal.orientation, ee.orientation).norm();
        if (g_p <= episode.max_trans_err && g_r <= episode.max_rot_err)
          return finish(true, FailureKind::none, step_i);
      }
    }
  }
  return finish(false, FailureKind::horizon, episode.horizon);
}

}  // namespace codesign::sim
