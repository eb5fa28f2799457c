#pragma once

#include <functional>
#include <optional>

#include "codesign/kin/kinematics.hpp"
#include "codesign/sim/tasks.hpp"

namespace codesign::sim {

/// Simulation state: planar base pose, joint configuration, elapsed time,
/// trajectory progress and accumulated tracking errors.
struct SimState {
  Eigen::Vector3d base{0, 0, 0};  // x, y, yaw
  kin::JointConfig q;
  double time = 0.0;
  double progress = 0.0;          // arc length consumed along the trajectory
  bool tracking_active = false;   // becomes true once the EE settles onto it
  double cum_trans_err = 0.0;
  double cum_rot_err = 0.0;
  long err_samples = 0;
};

enum class FailureKind { none, collision, joint_limit, tracking_exceeded, horizon };
std::string to_string(FailureKind kind);

struct EpisodeResult {
  bool success = false;
  FailureKind failure = FailureKind::none;
  int steps = 0;
  double mean_trans_err = 0.0;
  double mean_rot_err = 0.0;
  double sim_time = 0.0;
};

/// Commands for one control tick: base twist in the base frame (vx, vy, wz;
/// vy is projected out for differential drives), torso velocity and the
/// speed at which the end-effector reference advances.
struct ControlCommand {
  Eigen::Vector3d base_twist{0, 0, 0};
  double torso_velocity = 0.0;
  double ee_speed = 0.0;
};

struct ControlContext {
  const OccupancyMap* map = nullptr;
  const EETrajectory* trajectory = nullptr;
  double progress = 0.0;
  double total_length = 0.0;
  kin::Pose desired;        // trajectory pose at `progress`
  kin::Pose ee_world;       // current end-effector pose in the world
  double nominal_speed = 0.25;
  double dt = 0.02;
  double max_trans_err = 0.1;   // episode tracking thresholds
  double max_rot_err = 0.7854;
  model::DriveType drive = model::DriveType::omni;
};

using ControlPolicy = std::function<ControlCommand(const SimState&, const ControlContext&)>;

struct SimOptions {
  double dt = 0.02;            // s (50 Hz)
  double ee_radius = 0.05;     // m, end-effector collision disc
};

/// Kinematic simulator for one episode: analytic base integration (exact
/// SE(2) exponential per step), clamped torso integration, one DLS step of
/// the arm toward the end-effector target, and collision checks of the base
/// footprint and end-effector against the occupancy map.
class Simulator {
 public:
  Simulator(const model::RobotDescription& robot, const TaskEpisode& episode,
            const SimOptions& options = {});

  SimState initial_state() const;
  kin::Pose ee_world_pose(const SimState& state) const;
  const OccupancyMap& map() const { return map_; }
  const kin::Kinematics& kinematics() const { return kin_; }
  bool base_collides(const SimState& state) const;
  void open_door() { map_.open_door(); }

  /// Advances the state by dt toward `ee_target` (world frame). Returns the
  /// failure if one occurred; the state is then left at the failing step.
  std::optional<FailureKind> step(SimState& state, const ControlCommand& cmd,
                                  const kin::Pose& ee_target, double dt);

 private:
  kin::Kinematics kin_;
  model::DriveType drive_;
  Eigen::Vector2d footprint_;
  OccupancyMap map_;
  Eigen::Vector3d start_base_;
  double ee_radius_;
  int torso_dof_ = -1;
  std::vector<int> arm_dofs_;
  kin::IkParams arm_params_;
};

/// Integrates one bounded-horizon episode under the given policy.
EpisodeResult run_episode(const model::RobotDescription& robot, const TaskEpisode& episode,
                          const ControlPolicy& policy, const SimOptions& options = {});

/// Closed-form pose of a constant base-frame twist after time t (the SE(2)
/// exponential); the oracle for integration exactness.
Eigen::Vector3d constant_twist_pose(const Eigen::Vector3d& start, const Eigen::Vector3d& twist,
                                    double t);

}  // namespace codesign::sim
