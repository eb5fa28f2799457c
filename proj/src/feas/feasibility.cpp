#include "codesign/feas/feasibility.hpp"

#include <algorithm>
#include <cmath>

#include "codesign/common/errors.hpp"
#include "codesign/kin/kinematics.hpp"

namespace codesign::feas {

Eigen::Vector3d center_of_mass(const MassLayout& layout) {
  if (layout.components.empty()) throw EmptyLayout("mass layout has no components");
  double total = 0.0;
  Eigen::Vector3d weighted = Eigen::Vector3d::Zero();
  for (const auto& c : layout.components) {
    total += c.mass;
    weighted += c.mass * c.com;
  }
  if (total <= 0.0) throw EmptyLayout("mass layout has no positive mass");
  return weighted / total;
}

namespace {

/// Convex hull (monotone chain), counter-clockwise.
std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace

std::pair<bool, double> static_stability(const MassLayout& layout) {
  const Eigen::Vector3d com = center_of_mass(layout);
  const Eigen::Vector2d p = com.head<2>();
  if (layout.wheels.size() < 3) throw ValidationError("static stability needs >= 3 wheel contacts");
  const auto hull = convex_hull(layout.wheels);
  // Signed distance: positive strictly inside, negative outside.
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Eigen::Vector2d& a = hull[i];
    const Eigen::Vector2d& b = hull[(i + 1) % hull.size()];
    const Eigen::Vector2d edge = b - a;
    const double len = edge.norm();
    if (len < 1e-12) continue;
    // Hull is CCW, so the inward normal of edge a->b is (-e.y, e.x)/len.
    const double signed_dist = (edge.x() * (p.y() - a.y()) - edge.y() * (p.x() - a.x())) / len;
    margin = std::min(margin, signed_dist);
  }
  return {margin > 0.0, margin};
}

FeasibilityReport dynamic_stability(const MassLayout& layout, double pivot_x,
                                    const FeasibilityOptions& options) {
  FeasibilityReport report;
  const Eigen::Vector3d com = center_of_mass(layout);
  report.com_xy = com.head<2>();
  if (layout.wheels.size() >= 3) {
    auto [stable, margin] = static_stability(layout);
    report.statically_stable = stable;
    report.static_margin = margin;
  }

  // Pivot: the wheel contact closest to pivot_x, on the side of the COM.
  Eigen::Vector2d pivot(pivot_x, 0.0);
  double best = std::numeric_limits<double>::infinity();
  const double com_side = report.com_xy.y() >= 0.0 ? 1.0 : -1.0;
  for (const auto& w : layout.wheels) {
    const double dx = std::abs(w.x() - pivot_x);
    const double side_bonus = (w.y() * com_side >= 0.0) ? 0.0 : 1e-6;
    if (dx + side_bonus < best) {
      best = dx + side_bonus;
      pivot = w;
    }
  }

  double m_base = 0.0;
  for (const auto& c : layout.components)
    if (c.kind == ComponentKind::base) m_base += c.mass;
  const double com_ref_x = layout.braking_com_x.value_or(com.x());
  const double d = pivot_x - com_ref_x;
  report.tau_critical = m_base * layout.gravity * d;

  for (const auto& c : layout.components) {
    if (c.kind != ComponentKind::arm && c.kind != ComponentKind::payload) continue;
    const double horiz = std::hypot(c.com.x() - pivot.x(), c.com.y() - pivot.y());
    const double r3 = std::sqrt(horiz * horiz + c.com.z() * c.com.z());
    const double sin_alpha = r3 > 1e-12 ? horiz / r3 : 0.0;  // cos(beta), beta = pi/2 - alpha
    report.tau_grav += c.mass * layout.gravity * horiz;      // m g r sin(alpha)
    report.tau_acc += c.mass * layout.deceleration * c.com.z() * sin_alpha;
  }
  if (options.include_external_pull) report.external_torque = options.external_pull_torque;
  const double tau_max = report.tau_acc + report.tau_grav + report.external_torque;
  report.dynamically_stable = tau_max < report.tau_critical;
  report.margin = report.tau_critical - tau_max;
  return report;
}

MassLayout worst_case_layout(const model::RobotDescription& robot,
                             const model::DesignParams& omega) {
  const model::RobotDescription designed = model::apply_design(robot, omega);
  kin::Kinematics kin(designed);

  // Classify links by their position in the tree relative to the hooks.
  const int tower_hook = designed.joint_index(designed.hooks.tower);
  const int arm_hook = designed.joint_index(designed.hooks.arm);
  auto subtree_links = [&](int root_joint) {
    std::vector<bool> in(designed.links.size(), false);
    in[static_cast<std::size_t>(designed.link_index(designed.joint(root_joint).child))] = true;
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto& j : designed.joints) {
        int pi = designed.link_index(j.parent), ci = designed.link_index(j.child);
        if (in[static_cast<std::size_t>(pi)] && !in[static_cast<std::size_t>(ci)]) {
          in[static_cast<std::size_t>(ci)] = true;
          grew = true;
        }
      }
    }
    return in;
  };
  const auto tower_side = subtree_links(tower_hook);
  const auto arm_side = subtree_links(arm_hook);

  // Identify the torso (prismatic) dof and the two proximal revolute arm dofs.
  const auto& actuated = designed.actuated_joints();
  int torso_dof = -1;
  std::vector<int> arm_dofs;
  for (std::size_t i = 0; i < actuated.size(); ++i) {
    const auto& j = designed.joint(actuated[i]);
    const bool on_arm = arm_side[static_cast<std::size_t>(designed.link_index(j.child))];
    if (j.type == model::JointType::prismatic && !on_arm && torso_dof < 0)
      torso_dof = static_cast<int>(i);
    else if (on_arm)
      arm_dofs.push_back(static_cast<int>(i));
  }

  // Stretched pose: neutral everywhere, tower at its upper limit; then a
  // coarse grid over the two proximal arm joints picks the configuration
  // with the largest COM x-extent (payload included).
  kin::JointConfig base_q = kin.neutral_config();
  if (torso_dof >= 0) base_q[torso_dof] = kin.upper_limits()[torso_dof];

  auto layout_for = [&](const kin::JointConfig& q) {
    MassLayout layout;
    layout.max_payload_kg = designed.payload_kg;
    for (const auto& w : designed.footprint.wheels) layout.wheels.push_back(w);
    for (std::size_t li = 0; li < designed.links.size(); ++li) {
      const auto& link = designed.links[li];
      if (link.mass <= 0.0) continue;
      MassComponent c;
      c.name = link.name;
      if (arm_side[li])
        c.kind = ComponentKind::arm;
      else if (tower_side[li])
        c.kind = ComponentKind::tower;
      else
        c.kind = ComponentKind::base;
      c.mass = link.mass;
      c.com = kin.frame_transform(q, static_cast<int>(li)) * link.com;
      layout.components.push_back(c);
    }
    if (designed.payload_kg > 0.0) {
      MassComponent p;
      p.name = "payload";
      p.kind = ComponentKind::payload;
      p.mass = designed.payload_kg;
      p.com = kin.frame_transform(q, kin.ee_link_index()).translation();
      layout.components.push_back(p);
    }
    return layout;
  };

  const int kSamples = 16;
  kin::JointConfig best_q = base_q;
  double best_x = center_of_mass(layout_for(base_q)).x();
  const int n_search = std::min<std::size_t>(2, arm_dofs.size());
  if (n_search == 1) {
    for (int a = 0; a < kSamples; ++a) {
      kin::JointConfig q = base_q;
      const int d0 = arm_dofs[0];
      q[d0] = kin.lower_limits()[d0] +
              (kin.upper_limits()[d0] - kin.lower_limits()[d0]) * a / (kSamples - 1.0);
      const double x = center_of_mass(layout_for(q)).x();
      if (x > best_x) {
        best_x = x;
        best_q = q;
      }
    }
  } else if (n_search == 2) {
    for (int a = 0; a < kSamples; ++a) {
      for (int b = 0; b < kSamples; ++b) {
        kin::JointConfig q = base_q;
        const int d0 = arm_dofs[0], d1 = arm_dofs[1];
        q[d0] = kin.lower_limits()[d0] +
                (kin.upper_limits()[d0] - kin.lower_limits()[d0]) * a / (kSamples - 1.0);
        q[d1] = kin.lower_limits()[d1] +
                (kin.upper_limits()[d1] - kin.lower_limits()[d1]) * b / (kSamples - 1.0);
        const double x = center_of_mass(layout_for(q)).x();
        if (x > best_x) {
          best_x = x;
          best_q = q;
        }
      }
    }
  }
  return layout_for(best_q);
}

FeasibilityReport check_design(const model::RobotDescription& robot,
                               const model::DesignParams& omega,
                               const FeasibilityOptions& options) {
  const MassLayout layout = worst_case_layout(robot, omega);
  double pivot_x = options.pivot_x;
  if (!layout.wheels.empty()) {
    pivot_x = layout.wheels.front().x();
    for (const auto& w : layout.wheels) pivot_x = std::max(pivot_x, w.x());
  }
  FeasibilityOptions opt = options;
  opt.pivot_x = pivot_x;
  return dynamic_stability(layout, pivot_x, opt);
}

}  // namespace codesign::feas
