#include <Eigen/Geometry>

#include "codesign/common/errors.hpp"
#include "codesign/common/kvdoc.hpp"
#include "codesign/model/robot.hpp"

namespace codesign::model {

namespace {

Eigen::Vector3d vec3(const KvEntry& e) {
  auto v = e.numbers();
  if (v.size() != 3) throw ParseError("expected 3 numbers", e.line, e.key);
  return {v[0], v[1], v[2]};
}

CollisionPrimitive parse_collision(const KvEntry& e) {
  auto toks = e.tokens();
  CollisionPrimitive c;
  if (toks.empty() || toks[0] == "none") return c;
  if (toks[0] == "box") {
    if (toks.size() != 4) throw ParseError("box needs 3 half extents", e.line, e.key);
    c.kind = CollisionPrimitive::Kind::box;
    c.half_extents = {parse_number_token(toks[1], e.line), parse_number_token(toks[2], e.line),
                      parse_number_token(toks[3], e.line)};
    return c;
  }
  if (toks[0] == "sphere") {
    if (toks.size() != 2) throw ParseError("sphere needs a radius", e.line, e.key);
    c.kind = CollisionPrimitive::Kind::sphere;
    c.radius = parse_number_token(toks[1], e.line);
    return c;
  }
  throw ParseError("unknown collision primitive '" + toks[0] + "'", e.line, e.key);
}

Link parse_link(const KvEntry& b) {
  Link l;
  l.name = b.label.empty() ? b.get_string("name") : b.label;
  l.mass = b.get_number("mass", 0.0);
  if (const KvEntry* com = b.find("com")) l.com = vec3(*com);
  if (const KvEntry* col = b.find("collision")) l.collision = parse_collision(*col);
  return l;
}

Joint parse_joint(const KvEntry& b) {
  Joint j;
  j.name = b.label.empty() ? b.get_string("name") : b.label;
  const KvEntry& type = b.require("type");
  j.type = joint_type_from_string(type.value, type.line);
  j.parent = b.get_string("parent");
  j.child = b.get_string("child");
  if (const KvEntry* axis = b.find("axis")) {
    j.axis = vec3(*axis);
    double n = j.axis.norm();
    if (n > 1e-12) j.axis /= n;
  }
  j.origin = Eigen::Isometry3d::Identity();
  if (const KvEntry* xyz = b.find("origin")) j.origin.translation() = vec3(*xyz);
  if (const KvEntry* rpy = b.find("rpy")) {
    auto a = rpy->angles();
    if (a.size() != 3) throw ParseError("rpy needs 3 angles", rpy->line, "rpy");
    j.origin.linear() = (Eigen::AngleAxisd(a[2], Eigen::Vector3d::UnitZ()) *
                         Eigen::AngleAxisd(a[1], Eigen::Vector3d::UnitY()) *
                         Eigen::AngleAxisd(a[0], Eigen::Vector3d::UnitX()))
                            .toRotationMatrix();
  }
  if (j.type != JointType::fixed) {
    const KvEntry& lim = b.require("limits");
    auto lo_hi = j.type == JointType::revolute ? lim.angles() : lim.numbers();
    if (lo_hi.size() != 2) throw ParseError("limits need 2 values", lim.line, "limits");
    j.pos_lower = lo_hi[0];
    j.pos_upper = lo_hi[1];
    const KvEntry* vel = b.find("vel_limit");
    if (vel)
      j.vel_limit = j.type == JointType::revolute ? parse_angle_token(vel->value, vel->line)
                                                  : parse_number_token(vel->value, vel->line);
  }
  return j;
}

}  // namespace

RobotDescription parse_robot(const KvEntry& doc);

RobotDescription parse_robot(const std::string& text) {
  return parse_robot(parse_kvdoc(text));
}

RobotDescription parse_robot(const KvEntry& doc) {
  RobotDescription r;
  r.schema_version = static_cast<int>(doc.get_number("schema_version"));
  if (r.schema_version != 1)
    throw ParseError("unsupported schema_version " + std::to_string(r.schema_version),
                     doc.require("schema_version").line, "schema_version");
  r.name = doc.get_string("name", "robot");
  if (const KvEntry* drive = doc.find("drive"))
    r.drive = drive_type_from_string(drive->value, drive->line);
  r.payload_kg = doc.get_number("payload_kg", 0.0);

  for (const KvEntry* lb : doc.find_all("link")) r.links.push_back(parse_link(*lb));
  for (const KvEntry* jb : doc.find_all("joint")) r.joints.push_back(parse_joint(*jb));

  if (const KvEntry* fp = doc.find("base_footprint")) {
    if (const KvEntry* he = fp->find("half_extents")) {
      auto v = he->numbers();
      if (v.size() != 2) throw ParseError("half_extents needs 2 numbers", he->line, "half_extents");
      r.footprint.half_extents = {v[0], v[1]};
    }
    for (const KvEntry* w : fp->find_all("wheel")) {
      auto v = w->numbers();
      if (v.size() != 2) throw ParseError("wheel needs 2 coordinates", w->line, "wheel");
      r.footprint.wheels.emplace_back(v[0], v[1]);
    }
  }

  const KvEntry& hooks = doc.require("mount_hooks");
  r.hooks.tower = hooks.get_string("tower", "");
  r.hooks.arm = hooks.get_string("arm", "");
  r.hooks.ee = hooks.get_string("ee", "");

  r.validate();
  return r;
}

RobotDescription load_robot(const std::string& path) {
  return parse_robot(load_kvdoc(path));
}

}  // namespace codesign::model
