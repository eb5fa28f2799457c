#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "codesign/model/robot.hpp"

namespace codesign::feas {

enum class ComponentKind { base, tower, arm, payload };

struct MassComponent {
  std::string name;
  ComponentKind kind = ComponentKind::arm;
  double mass = 0.0;             // kg
  Eigen::Vector3d com{0, 0, 0};  // m, relative to the base center at ground level
};

/// Point-mass layout of the platform for the tipover analysis.
struct MassLayout {
  std::vector<MassComponent> components;
  std::vector<Eigen::Vector2d> wheels;   // contact xy, m
  double gravity = 9.81;                 // m/s^2
  double deceleration = 2.2;             // m/s^2, full-speed braking (1.1 m/s over 0.5 s)
  double max_payload_kg = 3.0;
  /// COM x used as the critical-torque lever reference. When unset the
  /// system COM of `components` is used. Kept explicit because a layout may
  /// specify its braking reference for a different configuration than the
  /// one its component positions describe.
  std::optional<double> braking_com_x;
};

struct FeasibilityReport {
  Eigen::Vector2d com_xy{0, 0};
  bool statically_stable = false;
  double static_margin = 0.0;    // m, signed distance of COM into the wheel polygon
  double tau_critical = 0.0;     // N*m
  double tau_acc = 0.0;          // N*m
  double tau_grav = 0.0;         // N*m
  double external_torque = 0.0;  // N*m, included in the sum when enabled
  bool dynamically_stable = false;
  double margin = 0.0;           // N*m, tau_critical - (tau_acc + tau_grav + external)
};

struct FeasibilityOptions {
  double pivot_x = 0.319;         // m, front wheel axis
  bool include_external_pull = false;
  double external_pull_torque = 30.0;  // N*m, arm safety limit when pulling on fixtures
};

/// Mass-weighted mean of component positions. Throws EmptyLayout.
Eigen::Vector3d center_of_mass(const MassLayout& layout);

/// Strict point-in-convex-polygon test of the COM against the wheel
/// contacts; margin is the signed distance to the nearest edge (negative
/// outside, zero on the boundary which counts as unstable).
std::pair<bool, double> static_stability(const MassLayout& layout);

/// Tipover torque balance about the braking pivot. The pivot point is the
/// wheel contact nearest pivot_x, on the side of the COM; arm-side
/// components (arm + payload) contribute the gravitational and braking
/// torques; the base mass resists via tau_critical = m_base * g * d.
FeasibilityReport dynamic_stability(const MassLayout& layout, double pivot_x,
                                    const FeasibilityOptions& options = {});

/// Both checks for a designed robot: applies omega, raises the tower to its
/// upper limit, stretches the arm toward the configuration maximizing the
/// COM x-extent (coarse grid over the two proximal arm joints) and attaches
/// the maximum payload at the end effector.
FeasibilityReport check_design(const model::RobotDescription& robot,
                               const model::DesignParams& omega,
                               const FeasibilityOptions& options = {});

/// The worst-case layout check_design builds (exposed for inspection/tests).
MassLayout worst_case_layout(const model::RobotDescription& robot,
                             const model::DesignParams& omega);

}  // namespace codesign::feas
