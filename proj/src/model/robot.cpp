#include "codesign/model/robot.hpp"

#include <cmath>
#include <set>

#include "codesign/common/errors.hpp"

namespace codesign::model {

JointType joint_type_from_string(const std::string& s, int line) {
  if (s == "revolute") return JointType::revolute;
  if (s == "prismatic") return JointType::prismatic;
  if (s == "fixed") return JointType::fixed;
  throw ParseError("unknown joint type '" + s + "'", line, "type");
}

std::string to_string(JointType t) {
  switch (t) {
    case JointType::revolute: return "revolute";
    case JointType::prismatic: return "prismatic";
    case JointType::fixed: return "fixed";
  }
  return "?";
}

DriveType drive_type_from_string(const std::string& s, int line) {
  if (s == "omni") return DriveType::omni;
  if (s == "differential") return DriveType::differential;
  throw ParseError("unknown drive type '" + s + "'", line, "drive");
}

std::string to_string(DriveType t) {
  return t == DriveType::omni ? "omni" : "differential";
}

int RobotDescription::link_index(const std::string& n) const {
  for (std::size_t i = 0; i < links.size(); ++i)
    if (links[i].name == n) return static_cast<int>(i);
  return -1;
}

int RobotDescription::joint_index(const std::string& n) const {
  for (std::size_t i = 0; i < joints.size(); ++i)
    if (joints[i].name == n) return static_cast<int>(i);
  return -1;
}

double RobotDescription::total_mass() const {
  double m = 0.0;
  for (const auto& l : links) m += l.mass;
  return m;
}

void RobotDescription::validate() {
  if (links.empty()) throw ValidationError("description has no links");
  std::set<std::string> link_names;
  for (const auto& l : links) {
    if (!link_names.insert(l.name).second)
      throw ValidationError("duplicate link name '" + l.name + "'");
  }
  std::set<std::string> joint_names;
  std::set<std::string> children;
  for (const auto& j : joints) {
    if (!joint_names.insert(j.name).second)
      throw ValidationError("duplicate joint name '" + j.name + "'");
    if (link_index(j.parent) < 0)
      throw ValidationError("joint '" + j.name + "' has unknown parent link '" + j.parent + "'");
    if (link_index(j.child) < 0)
      throw ValidationError("joint '" + j.name + "' has unknown child link '" + j.child + "'");
    if (!children.insert(j.child).second)
      throw ValidationError("link '" + j.child + "' has more than one parent joint");
    if (j.type != JointType::fixed) {
      if (!std::isfinite(j.pos_lower) || !std::isfinite(j.pos_upper) || j.pos_lower > j.pos_upper)
        throw ValidationError("joint '" + j.name + "' needs finite position limits");
      if (j.axis.norm() < 1e-9)
        throw ValidationError("joint '" + j.name + "' has a zero axis");
    }
  }

  // Exactly one root, and every link reachable from it (otherwise the
  // parent/child graph contains a cycle or a disconnected island).
  root_link_.clear();
  for (const auto& l : links) {
    if (!children.count(l.name)) {
      if (!root_link_.empty())
        throw ValidationError("multiple root links: '" + root_link_ + "' and '" + l.name + "'");
      root_link_ = l.name;
    }
  }
  if (root_link_.empty()) throw ValidationError("no root link (joint graph has a cycle)");
  std::set<std::string> reachable;
  reachable.insert(root_link_);
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& j : joints) {
      if (reachable.count(j.parent) && !reachable.count(j.child)) {
        reachable.insert(j.child);
        grew = true;
      }
    }
  }
  if (reachable.size() != links.size())
    throw ValidationError("joint graph contains a cycle or unreachable links");

  auto check_hook = [&](const std::string& hook, const char* which) {
    if (hook.empty() || joint_index(hook) < 0)
      throw MountHookMissing(std::string("mount hook '") + which + "' references missing joint '" +
                             hook + "'");
  };
  check_hook(hooks.tower, "tower");
  check_hook(hooks.arm, "arm");
  check_hook(hooks.ee, "ee");

  actuated_.clear();
  for (std::size_t i = 0; i < joints.size(); ++i)
    if (joints[i].type != JointType::fixed) actuated_.push_back(static_cast<int>(i));

  ee_link_ = joints[static_cast<std::size_t>(joint_index(hooks.ee))].child;

  if (footprint.wheels.size() < 3 && !footprint.wheels.empty())
    throw ValidationError("base footprint needs at least 3 wheel contacts");
}

RobotDescription apply_design(const RobotDescription& base, const DesignParams& omega) {
  RobotDescription out = base;
  auto hook_joint = [&](const std::string& name, const char* which) -> Joint& {
    int idx = out.joint_index(name);
    if (idx < 0)
      throw MountHookMissing(std::string("mount hook '") + which + "' references missing joint '" +
                             name + "'");
    return out.joints[static_cast<std::size_t>(idx)];
  };

  Joint& tower = hook_joint(out.hooks.tower, "tower");
  tower.origin.translation().x() += omega.forward_x;
  tower.origin.translation().y() += omega.lateral_y;
  tower.origin.linear() =
      Eigen::AngleAxisd(omega.tower_yaw_phi, Eigen::Vector3d::UnitZ()).toRotationMatrix() *
      tower.origin.linear();

  Joint& arm = hook_joint(out.hooks.arm, "arm");
  arm.origin.translation().x() -= omega.forward_x;
  arm.origin.linear() = arm.origin.linear() *
      (Eigen::AngleAxisd(omega.arm_pitch_alpha, Eigen::Vector3d::UnitY()) *
       Eigen::AngleAxisd(omega.arm_yaw_beta, Eigen::Vector3d::UnitZ()))
          .toRotationMatrix();

  Joint& ee = hook_joint(out.hooks.ee, "ee");
  ee.origin.linear() = ee.origin.linear() *
      Eigen::AngleAxisd(omega.ee_pitch_rho, Eigen::Vector3d::UnitY()).toRotationMatrix();

  out.validate();
  return out;
}

}  // namespace codesign::model
