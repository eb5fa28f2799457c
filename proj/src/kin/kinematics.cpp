#include "codesign/kin/kinematics.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "codesign/common/errors.hpp"
#include "codesign/common/rng.hpp"

namespace codesign::kin {

using model::JointType;

Kinematics::Kinematics(const model::RobotDescription& robot) : robot_(robot) {
  robot_.validate();
  const std::size_t n_links = robot_.links.size();
  parent_joint_.assign(n_links, -1);
  for (std::size_t j = 0; j < robot_.joints.size(); ++j) {
    int child = robot_.link_index(robot_.joints[j].child);
    parent_joint_[static_cast<std::size_t>(child)] = static_cast<int>(j);
  }
  path_.resize(n_links);
  for (std::size_t l = 0; l < n_links; ++l) {
    std::vector<int> rev;
    int link = static_cast<int>(l);
    while (parent_joint_[static_cast<std::size_t>(link)] >= 0) {
      int j = parent_joint_[static_cast<std::size_t>(link)];
      rev.push_back(j);
      link = robot_.link_index(robot_.joints[static_cast<std::size_t>(j)].parent);
    }
    path_[l].assign(rev.rbegin(), rev.rend());
  }
  dof_index_.assign(robot_.joints.size(), -1);
  const auto& actuated = robot_.actuated_joints();
  lower_.resize(static_cast<int>(actuated.size()));
  upper_.resize(static_cast<int>(actuated.size()));
  for (std::size_t i = 0; i < actuated.size(); ++i) {
    dof_index_[static_cast<std::size_t>(actuated[i])] = static_cast<int>(i);
    lower_[static_cast<int>(i)] = robot_.joint(actuated[i]).pos_lower;
    upper_[static_cast<int>(i)] = robot_.joint(actuated[i]).pos_upper;
  }
  ee_link_ = robot_.link_index(robot_.ee_link());
}

void Kinematics::check_q(const JointConfig& q) const {
  if (q.size() != dof())
    throw DimensionMismatch("joint config has " + std::to_string(q.size()) + " entries, robot has " +
                            std::to_string(dof()) + " non-fixed joints");
}

int Kinematics::require_link(const std::string& frame) const {
  int idx = robot_.link_index(frame);
  if (idx < 0) throw UnknownFrame("unknown frame '" + frame + "'");
  return idx;
}

Eigen::Isometry3d Kinematics::frame_transform(const JointConfig& q, int link_index) const {
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  for (int j : path_[static_cast<std::size_t>(link_index)]) {
    const model::Joint& joint = robot_.joint(j);
    T = T * joint.origin;
    int d = dof_index_[static_cast<std::size_t>(j)];
    if (d >= 0) {
      double v = q[d];
      if (joint.type == JointType::revolute)
        T.rotate(Eigen::AngleAxisd(v, joint.axis));
      else
        T.translate(joint.axis * v);
    }
  }
  return T;
}

Pose Kinematics::forward_kinematics(const JointConfig& q, const std::string& frame) const {
  check_q(q);
  return Pose::from_isometry(frame_transform(q, require_link(frame)));
}

Pose Kinematics::ee_pose(const JointConfig& q) const {
  check_q(q);
  return Pose::from_isometry(frame_transform(q, ee_link_));
}

Eigen::MatrixXd Kinematics::jacobian(const JointConfig& q, const std::string& frame,
                                     const JacobianOptions& options) const {
  check_q(q);
  int link = require_link(frame);

  std::vector<int> selected;
  if (options.joints.empty()) {
    selected.resize(static_cast<std::size_t>(dof()));
    for (int i = 0; i < dof(); ++i) selected[static_cast<std::size_t>(i)] = i;
  } else {
    selected = options.joints;
  }

  const int base_cols = options.include_base ? 3 : 0;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(6, base_cols + static_cast<int>(selected.size()));

  // End-effector position and per-joint frames along the path.
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  std::vector<Eigen::Isometry3d> joint_frames;       // frame after each joint on the path
  const auto& path = path_[static_cast<std::size_t>(link)];
  joint_frames.reserve(path.size());
  for (int j : path) {
    const model::Joint& joint = robot_.joint(j);
    T = T * joint.origin;
    int d = dof_index_[static_cast<std::size_t>(j)];
    if (d >= 0) {
      double v = q[d];
      if (joint.type == JointType::revolute)
        T.rotate(Eigen::AngleAxisd(v, joint.axis));
      else
        T.translate(joint.axis * v);
    }
    joint_frames.push_back(T);
  }
  const Eigen::Vector3d p_ee = T.translation();

  if (options.include_base) {
    // Virtual planar base: x, y prismatic then yaw about the base origin.
    J.col(0).head<3>() = Eigen::Vector3d::UnitX();
    J.col(1).head<3>() = Eigen::Vector3d::UnitY();
    J.col(2).head<3>() = Eigen::Vector3d::UnitZ().cross(p_ee);
    J.col(2).tail<3>() = Eigen::Vector3d::UnitZ();
  }

  for (std::size_t k = 0; k < path.size(); ++k) {
    int j = path[k];
    int d = dof_index_[static_cast<std::size_t>(j)];
    if (d < 0) continue;
    // Column position of this dof in the selection, if selected.
    int col = -1;
    for (std::size_t s = 0; s < selected.size(); ++s) {
      if (selected[s] == d) {
        col = base_cols + static_cast<int>(s);
        break;
      }
    }
    if (col < 0) continue;
    const model::Joint& joint = robot_.joint(j);
    const Eigen::Vector3d axis_world = joint_frames[k].linear() * joint.axis;
    if (joint.type == JointType::revolute) {
      const Eigen::Vector3d p_j = joint_frames[k].translation();
      J.col(col).head<3>() = axis_world.cross(p_ee - p_j);
      J.col(col).tail<3>() = axis_world;
    } else {
      J.col(col).head<3>() = axis_world;
    }
  }
  return J;
}

void Kinematics::clamp_to_limits(JointConfig& q) const {
  check_q(q);
  for (int i = 0; i < q.size(); ++i) q[i] = std::clamp(q[i], lower_[i], upper_[i]);
}

bool Kinematics::within_limits(const JointConfig& q, double tol) const {
  check_q(q);
  for (int i = 0; i < q.size(); ++i)
    if (q[i] < lower_[i] - tol || q[i] > upper_[i] + tol) return false;
  return true;
}

JointConfig Kinematics::neutral_config() const {
  JointConfig q = JointConfig::Zero(dof());
  clamp_to_limits(q);
  return q;
}

JointConfig Kinematics::sample_config(std::uint64_t seed) const {
  Rng rng(seed);
  JointConfig q(dof());
  for (int i = 0; i < dof(); ++i) q[i] = rng.uniform(lower_[i], upper_[i]);
  return q;
}

double Kinematics::dls_step(JointConfig& q, const Pose& target, const IkParams& params) const {
  std::vector<int> sel = params.joints;
  if (sel.empty()) {
    sel.resize(static_cast<std::size_t>(dof()));
    for (int i = 0; i < dof(); ++i) sel[static_cast<std::size_t>(i)] = i;
  }
  const Pose current = ee_pose(q);
  Eigen::Matrix<double, 6, 1> err;
  err.head<3>() = target.position - current.position;
  err.tail<3>() =
      params.rotation_weight * orientation_error(target.orientation, current.orientation);

  JacobianOptions jopt;
  jopt.joints = sel;
  Eigen::MatrixXd J = jacobian(q, robot_.ee_link(), jopt);
  if (params.rotation_weight != 1.0) J.bottomRows<3>() *= params.rotation_weight;
  const double lambda2 = params.damping * params.damping;
  Eigen::Matrix<double, 6, 6> JJt = J * J.transpose();
  JJt.diagonal().array() += lambda2;
  const Eigen::VectorXd dq = J.transpose() * JJt.ldlt().solve(err);

  for (std::size_t s = 0; s < sel.size(); ++s) {
    double step = std::clamp(dq[static_cast<int>(s)], -params.step_clamp, params.step_clamp);
    int i = sel[s];
    q[i] += step;
    if (params.clamp_to_limits) q[i] = std::clamp(q[i], lower_[i], upper_[i]);
  }
  return err.head<3>().norm();
}

std::optional<JointConfig> Kinematics::ik_dls(const Pose& target, const JointConfig& seed,
                                              const IkParams& params) const {
  check_q(seed);
  JointConfig q = seed;
  if (params.clamp_to_limits) clamp_to_limits(q);
  for (int iter = 0; iter <= params.max_iterations; ++iter) {
    const Pose current = ee_pose(q);
    const double pos_err = (target.position - current.position).norm();
    const double rot_err = orientation_error(target.orientation, current.orientation).norm();
    if (pos_err < params.pos_tolerance && rot_err < params.rot_tolerance) return q;
    if (iter == params.max_iterations) break;
    dls_step(q, target, params);
  }
  return std::nullopt;
}

}  // namespace codesign::kin
