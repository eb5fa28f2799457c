#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "codesign/kin/geometry.hpp"
#include "codesign/model/robot.hpp"

namespace codesign::kin {

/// Positions of the non-fixed joints, in description order.
using JointConfig = Eigen::VectorXd;

/// Which columns the Jacobian carries. Base planar DoF are modeled as two
/// virtual prismatic joints (world x, y) plus one virtual revolute joint
/// (yaw about the base origin), prepended in that order.
struct JacobianOptions {
  bool include_base = false;
  /// Actuated-joint indices (into actuated_joints()) to include; empty = all.
  std::vector<int> joints;
};

struct IkParams {
  double damping = 0.01;      // DLS lambda
  double step_clamp = 0.2;    // rad or m per joint per iteration
  int max_iterations = 200;
  double pos_tolerance = 1e-4;   // m
  double rot_tolerance = 1e-3;   // rad
  bool clamp_to_limits = true;
  /// Relative weight of the angular error rows in the DLS system. 1 treats
  /// one radian like one meter; the simulator steps with 0.5 so position
  /// wins when the two conflict.
  double rotation_weight = 1.0;
  /// Actuated-joint indices the solver may move; empty = all.
  std::vector<int> joints;
};

/// Forward kinematics, geometric Jacobians and damped-least-squares IK over
/// one robot description. Construction precomputes the root-to-link joint
/// paths; all queries are const and safe to call concurrently.
class Kinematics {
 public:
  explicit Kinematics(const model::RobotDescription& robot);

  int dof() const { return static_cast<int>(robot_.actuated_joints().size()); }
  const model::RobotDescription& robot() const { return robot_; }

  /// Pose of `frame` (a link name) in the base frame. Throws UnknownFrame /
  /// DimensionMismatch.
  Pose forward_kinematics(const JointConfig& q, const std::string& frame) const;
  Eigen::Isometry3d frame_transform(const JointConfig& q, int link_index) const;
  Pose ee_pose(const JointConfig& q) const;

  /// Geometric Jacobian of `frame`, 6 x n (linear on top, angular below),
  /// expressed in the base frame.
  Eigen::MatrixXd jacobian(const JointConfig& q, const std::string& frame,
                           const JacobianOptions& options = {}) const;

  /// Damped-least-squares IK toward `target` for the end-effector link.
  /// Returns std::nullopt when the residual tolerance is not reached within
  /// the iteration cap (not reachable, or basin not found from this seed).
  std::optional<JointConfig> ik_dls(const Pose& target, const JointConfig& seed,
                                    const IkParams& params = {}) const;

  /// One DLS update toward `target` (used by the simulator's arm stepping);
  /// modifies q in place and returns the position residual before the step.
  double dls_step(JointConfig& q, const Pose& target, const IkParams& params) const;

  /// Clamps every entry of q into its joint limits.
  void clamp_to_limits(JointConfig& q) const;
  bool within_limits(const JointConfig& q, double tol = 1e-9) const;
  JointConfig neutral_config() const;  // zeros clamped into limits
  JointConfig sample_config(std::uint64_t seed) const;  // uniform within limits

  int ee_link_index() const { return ee_link_; }
  /// Lower/upper limits per actuated joint.
  const Eigen::VectorXd& lower_limits() const { return lower_; }
  const Eigen::VectorXd& upper_limits() const { return upper_; }

 private:
  void check_q(const JointConfig& q) const;
  int require_link(const std::string& frame) const;

  model::RobotDescription robot_;
  std::vector<int> parent_joint_;            // per link: parent joint index or -1
  std::vector<std::vector<int>> path_;       // per link: joint indices root..link
  std::vector<int> dof_index_;               // per joint: actuated index or -1
  Eigen::VectorXd lower_, upper_;
  int ee_link_ = -1;
};

}  // namespace codesign::kin
