#pragma once

#include <optional>
#include <vector>

#include "codesign/kin/geometry.hpp"
#include "codesign/sim/occupancy.hpp"

namespace codesign::sim {

enum class TrajKind { line, arc, door, drawer, cabinet, planner };

/// Ordered end-effector waypoints with a nominal speed; poses between
/// waypoints interpolate linearly in position and slerp in orientation,
/// parameterized by arc length.
struct EETrajectory {
  std::vector<kin::Pose> waypoints;
  double speed = 0.25;  // m/s nominal
  TrajKind kind = TrajKind::line;

  double length() const;
  kin::Pose pose_at(double s) const;  // s clamped into [0, length()]
  const kin::Pose& front() const { return waypoints.front(); }
  const kin::Pose& back() const { return waypoints.back(); }
};

enum class HingeSide { left, right };

struct ArticulatedParams {
  double pull_length = 0.3;        // m, drawer travel
  double radius = 0.8;             // m, hinge to handle (door leaf width)
  double opening_angle = M_PI / 2; // rad
  HingeSide side = HingeSide::left;
  int waypoint_count = 12;         // samples along an arc
  double speed = 0.25;             // m/s
};

/// Object-centric opening motions. The object pose's x-axis is the outward
/// normal at the handle (pointing toward the approaching robot), z up.
/// drawer: straight pull along the normal. door/cabinet: circular arc about
/// the vertical hinge axis offset `radius` to the side of the handle.
EETrajectory articulated_trajectory(TrajKind kind, const kin::Pose& object_pose,
                                    const ArticulatedParams& params);

struct PlannerParams {
  double inflation_radius = 0.45;  // m, obstacle dilation for base clearance
};

/// A* over the occupancy grid (8-connected, Euclidean heuristic, no corner
/// cutting), waypoints at cell centers; heights and orientations interpolate
/// from start to goal along the path. Returns nullopt when no path exists.
std::optional<EETrajectory> plan_ee_path(const OccupancyMap& map, const kin::Pose& start,
                                         const kin::Pose& goal, const PlannerParams& params = {});

/// Cost of the path found by plan_ee_path in meters (for oracle checks);
/// nullopt when unreachable.
std::optional<double> plan_path_cost(const OccupancyMap& map, const Eigen::Vector2d& start,
                                     const Eigen::Vector2d& goal, const PlannerParams& params = {});

}  // namespace codesign::sim
