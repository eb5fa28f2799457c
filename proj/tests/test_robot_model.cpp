#include <cmath>

#include "doctest.h"

#include "codesign/common/errors.hpp"
#include "codesign/kin/kinematics.hpp"
#include "codesign/model/robot.hpp"

using namespace codesign;
using namespace codesign::model;

namespace {

const char* kMiniRobot = R"(
schema_version: 1
name: mini
payload_kg: 1.0
base_footprint {
  half_extents: 0.3 0.25
  wheel: 0.2 0.15
  wheel: 0.2 -0.15
  wheel: -0.2 0.15
  wheel: -0.2 -0.15
}
mount_hooks {
  tower: tower_mount
  arm: arm_mount
  ee: ee_mount
}
link "base_link" {
  mass: 20.0
  com: 0 0 0.1
}
link "tower" {
  mass: 5.0
  com: 0 0 0.2
}
link "arm" {
  mass: 2.0
  com: 0 0 0.1
}
link "hand" {
  mass: 0.5
  com: 0 0 0.02
}
joint "tower_mount" {
  type: fixed
  parent: base_link
  child: tower
  origin: 0.1 0.0 0.2
}
joint "arm_mount" {
  type: fixed
  parent: tower
  child: arm
  origin: 0.05 0.0 0.4
}
joint "ee_mount" {
  type: fixed
  parent: arm
  child: hand
  origin: 0.0 0.0 0.3
}
)";

RobotDescription mini() { return parse_robot(kMiniRobot); }

}  // namespace

TEST_SUITE("robot-model") {

TEST_CASE("bundled description loads with the expected structure") {
  RobotDescription r = load_robot(std::string(CODESIGN_ASSET_DIR) + "/robots/fmm_franka.robot");
  int revolute = 0, prismatic = 0;
  for (const auto& j : r.joints) {
    if (j.type == JointType::revolute) ++revolute;
    if (j.type == JointType::prismatic) ++prismatic;
  }
  CHECK(revolute == 7);
  CHECK(prismatic == 1);
  CHECK(r.drive == DriveType::omni);
  CHECK(r.actuated_joints().size() == 8);
  CHECK(r.payload_kg == doctest::Approx(3.0));
  CHECK(r.footprint.wheels.size() == 4);
  CHECK(r.root_link() == "base_link");
}

TEST_CASE("the 6-DoF arm description loads and validates") {
  RobotDescription r = load_robot(std::string(CODESIGN_ASSET_DIR) + "/robots/fmm_ur5.robot");
  int revolute = 0;
  for (const auto& j : r.joints)
    if (j.type == JointType::revolute) ++revolute;
  CHECK(revolute == 6);
  CHECK(r.actuated_joints().size() == 7);  // six arm joints plus the torso lift
}

TEST_CASE("joint cycle is rejected") {
  std::string text = kMiniRobot;
  text += R"(
joint "loop" {
  type: fixed
  parent: hand
  child: base_link
  origin: 0 0 0
}
)";
  CHECK_THROWS_AS(parse_robot(text), ValidationError);
}

TEST_CASE("missing tower hook is rejected") {
  std::string text = kMiniRobot;
  auto pos = text.find("tower: tower_mount");
  text.replace(pos, std::string("tower: tower_mount").size(), "tower: nonexistent");
  CHECK_THROWS_AS(parse_robot(text), MountHookMissing);
}

TEST_CASE("non-finite and missing limits are rejected") {
  std::string text = kMiniRobot;
  text += R"(
link "extra" {
  mass: 0.1
}
joint "j" {
  type: revolute
  parent: hand
  child: extra
  axis: 0 0 1
  origin: 0 0 0.1
  limits: 0deg inf
}
)";
  CHECK_THROWS(parse_robot(text));
}

TEST_CASE("parse errors carry line numbers") {
  try {
    parse_robot("schema_version: 1\nbogus line without colon\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("apply_design with zero omega is the identity") {
  RobotDescription base = mini();
  RobotDescription out = apply_design(base, DesignParams::tabletop());
  for (std::size_t i = 0; i < base.joints.size(); ++i) {
    CHECK(out.joints[i].origin.translation() == base.joints[i].origin.translation());
    CHECK(out.joints[i].origin.linear() == base.joints[i].origin.linear());
  }
}

TEST_CASE("apply_design never mutates the base and preserves total mass") {
  RobotDescription base = mini();
  const double mass_before = base.total_mass();
  const Eigen::Vector3d tower_before =
      base.joints[static_cast<std::size_t>(base.joint_index("tower_mount"))].origin.translation();
  DesignParams omega = DesignParams::make(0.7, 0.3, 0.5, 0.12, -0.1, 0.4);
  RobotDescription out = apply_design(base, omega);
  CHECK(base.joints[static_cast<std::size_t>(base.joint_index("tower_mount"))]
            .origin.translation() == tower_before);
  CHECK(out.total_mass() == doctest::Approx(mass_before).epsilon(1e-15));
  // Purity: same inputs, identical outputs.
  RobotDescription out2 = apply_design(base, omega);
  for (std::size_t i = 0; i < out.joints.size(); ++i) {
    CHECK(out.joints[i].origin.translation() == out2.joints[i].origin.translation());
    CHECK(out.joints[i].origin.linear() == out2.joints[i].origin.linear());
  }
}

TEST_CASE("forward translation shifts tower and counter-shifts arm") {
  RobotDescription base = mini();
  DesignParams omega;
  omega.forward_x = 0.10;
  RobotDescription out = apply_design(base, omega);
  const auto& tower = out.joints[static_cast<std::size_t>(out.joint_index("tower_mount"))];
  const auto& arm = out.joints[static_cast<std::size_t>(out.joint_index("arm_mount"))];
  CHECK(tower.origin.translation().x() == doctest::Approx(0.1 + 0.10));
  CHECK(arm.origin.translation().x() == doctest::Approx(0.05 - 0.10));
  // The arm keeps its absolute position on the base while tower spacing changes.
  kin::Kinematics before(base), after(out);
  const kin::JointConfig q0(0);
  const Eigen::Vector3d arm_world_before = before.forward_kinematics(q0, "arm").position;
  const Eigen::Vector3d arm_world_after = after.forward_kinematics(q0, "arm").position;
  CHECK((arm_world_before - arm_world_after).norm() < 1e-12);
}

TEST_CASE("alpha = pi/2 points the arm frame z along base +x") {
  RobotDescription base = mini();
  DesignParams omega;
  omega.arm_pitch_alpha = M_PI / 2;
  RobotDescription out = apply_design(base, omega);
  kin::Kinematics kin(out);
  const Eigen::Matrix3d R =
      kin.forward_kinematics(kin::JointConfig(0), "arm").orientation.toRotationMatrix();
  CHECK((R.col(2) - Eigen::Vector3d::UnitX()).norm() < 1e-12);
}

TEST_CASE("rotation order is alpha then beta about the rotated axis") {
  RobotDescription base = mini();
  DesignParams omega;
  omega.arm_pitch_alpha = M_PI / 2;
  omega.arm_yaw_beta = M_PI / 2;
  RobotDescription out = apply_design(base, omega);
  kin::Kinematics kin(out);
  const Eigen::Matrix3d R =
      kin.forward_kinematics(kin::JointConfig(0), "arm").orientation.toRotationMatrix();
  // Ry(a) * Rz(b) applied to x: x -> y -> stays y under Ry composition order.
  const Eigen::Matrix3d expected =
      (Eigen::AngleAxisd(M_PI / 2, Eigen::Vector3d::UnitY()) *
       Eigen::AngleAxisd(M_PI / 2, Eigen::Vector3d::UnitZ()))
          .toRotationMatrix();
  CHECK((R - expected).norm() < 1e-12);
  const Eigen::Matrix3d swapped =
      (Eigen::AngleAxisd(M_PI / 2, Eigen::Vector3d::UnitZ()) *
       Eigen::AngleAxisd(M_PI / 2, Eigen::Vector3d::UnitY()))
          .toRotationMatrix();
  CHECK((R - swapped).norm() > 0.5);  // the two orders are observably different
}

TEST_CASE("apply_design on a robot without hooks fails") {
  RobotDescription base = mini();
  base.hooks.tower = "gone";
  CHECK_THROWS_AS(apply_design(base, DesignParams::tabletop()), MountHookMissing);
}

TEST_CASE("angle suffixes parse in degrees and radians") {
  RobotDescription r = load_robot(std::string(CODESIGN_ASSET_DIR) + "/robots/fmm_franka.robot");
  const auto& j1 = r.joints[static_cast<std::size_t>(r.joint_index("arm_j1"))];
  CHECK(j1.pos_upper == doctest::Approx(166.0 * M_PI / 180.0));
  CHECK(j1.pos_lower == doctest::Approx(-166.0 * M_PI / 180.0));
}

}  // TEST_SUITE
