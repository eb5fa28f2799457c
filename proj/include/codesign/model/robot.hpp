#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "codesign/model/design.hpp"

namespace codesign::model {

enum class JointType { revolute, prismatic, fixed };
enum class DriveType { omni, differential };

JointType joint_type_from_string(const std::string& s, int line);
std::string to_string(JointType t);
DriveType drive_type_from_string(const std::string& s, int line);
std::string to_string(DriveType t);

/// Coarse collision primitive attached to a link frame.
struct CollisionPrimitive {
  enum class Kind { none, box, sphere } kind = Kind::none;
  Eigen::Vector3d half_extents{0, 0, 0};  // box
  double radius = 0.0;                    // sphere
};

struct Link {
  std::string name;
  double mass = 0.0;                 // kg
  Eigen::Vector3d com{0, 0, 0};      // m, in the link frame
  CollisionPrimitive collision;
};

struct Joint {
  std::string name;
  JointType type = JointType::fixed;
  std::string parent;                          // parent link name
  std::string child;                           // child link name
  Eigen::Vector3d axis{0, 0, 1};               // unit, in the joint frame
  Eigen::Isometry3d origin = Eigen::Isometry3d::Identity();  // parent -> joint frame
  double pos_lower = 0.0;                      // rad or m
  double pos_upper = 0.0;
  double vel_limit = 1.0;                      // rad/s or m/s
};

struct Footprint {
  Eigen::Vector2d half_extents{0.4, 0.3};      // m
  std::vector<Eigen::Vector2d> wheels;          // contact xy, m
};

/// Joints where a design point is injected: the tower mount on the base,
/// the arm mount on the tower, and the end-effector mount.
struct MountHooks {
  std::string tower;
  std::string arm;
  std::string ee;
};

/// A complete kinematic description: a tree of links connected by joints,
/// rooted at the base link (whose frame sits at the ground-plane center of
/// the base), plus footprint, mount hooks and payload.
struct RobotDescription {
  int schema_version = 1;
  std::string name;
  DriveType drive = DriveType::omni;
  std::vector<Link> links;
  std::vector<Joint> joints;
  Footprint footprint;
  MountHooks hooks;
  double payload_kg = 0.0;

  int link_index(const std::string& name) const;    // -1 if absent
  int joint_index(const std::string& name) const;   // -1 if absent
  const Link& link(int i) const { return links[static_cast<std::size_t>(i)]; }
  const Joint& joint(int i) const { return joints[static_cast<std::size_t>(i)]; }

  /// Root link (no parent joint). Valid only after validate().
  const std::string& root_link() const { return root_link_; }
  /// Indices of non-fixed joints, in description order.
  const std::vector<int>& actuated_joints() const { return actuated_; }
  /// Link the end-effector hook joint attaches (its child).
  const std::string& ee_link() const { return ee_link_; }
  double total_mass() const;

  /// Checks tree structure, finite limits and hook references; fills the
  /// derived fields above. Throws ValidationError / MountHookMissing.
  void validate();

 private:
  std::string root_link_;
  std::vector<int> actuated_;
  std::string ee_link_;
};

/// Returns a copy of `base` with the design point applied at the hooks:
/// tower mount translated by (forward_x, lateral_y) and yawed by phi, arm
/// mount counter-translated by -forward_x and rotated Ry(alpha)*Rz(beta),
/// end-effector mount rotated Ry(rho). The input is never modified.
RobotDescription apply_design(const RobotDescription& base, const DesignParams& omega);

/// Loads and validates a robot description file.
/// Throws ParseError with line/field diagnostics, or ValidationError.
RobotDescription load_robot(const std::string& path);
RobotDescription parse_robot(const std::string& text);

}  // namespace codesign::model
