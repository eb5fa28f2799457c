#pragma once

#include <string>

#include "codesign/model/robot.hpp"

namespace test_helpers {

inline codesign::model::RobotDescription load_asset_robot(const std::string& name) {
  return codesign::model::load_robot(std::string(CODESIGN_ASSET_DIR) + "/robots/" + name);
}

/// Planar 2R arm in the xy-plane: two revolute z joints, links along x.
/// FK: p = (l1 c1 + l2 c12, l1 s1 + l2 s12, 0).
inline codesign::model::RobotDescription make_planar_2r(double l1 = 1.0, double l2 = 1.0) {
  using namespace codesign::model;
  RobotDescription r;
  r.name = "planar2r";
  r.payload_kg = 0.0;
  r.footprint.half_extents = {0.1, 0.1};
  r.footprint.wheels = {{0.1, 0.1}, {0.1, -0.1}, {-0.1, 0.1}, {-0.1, -0.1}};

  auto add_link = [&](const std::string& name, double mass) {
    Link l;
    l.name = name;
    l.mass = mass;
    r.links.push_back(l);
  };
  add_link("base_link", 1.0);
  add_link("link1", 0.5);
  add_link("link2", 0.5);
  add_link("tip", 0.0);

  Joint j1;
  j1.name = "j1";
  j1.type = JointType::revolute;
  j1.parent = "base_link";
  j1.child = "link1";
  j1.axis = Eigen::Vector3d::UnitZ();
  j1.pos_lower = -M_PI;
  j1.pos_upper = M_PI;
  j1.vel_limit = 3.0;
  r.joints.push_back(j1);

  Joint j2 = j1;
  j2.name = "j2";
  j2.parent = "link1";
  j2.child = "link2";
  j2.origin.translation() = Eigen::Vector3d(l1, 0, 0);
  r.joints.push_back(j2);

  Joint ee;
  ee.name = "ee_mount";
  ee.type = JointType::fixed;
  ee.parent = "link2";
  ee.child = "tip";
  ee.origin.translation() = Eigen::Vector3d(l2, 0, 0);
  r.joints.push_back(ee);

  r.hooks.tower = "j1";
  r.hooks.arm = "j1";
  r.hooks.ee = "ee_mount";
  r.validate();
  return r;
}

}  // namespace test_helpers
