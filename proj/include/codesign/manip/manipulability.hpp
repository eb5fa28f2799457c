#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "codesign/kin/kinematics.hpp"

namespace codesign::manip {

/// Velocity-ellipsoid volume sqrt(det(J J^T)), computed as the product of
/// singular values. Rank-deficient or near-singular Jacobians return 0.
double manipulability_measure(const Eigen::MatrixXd& J);

/// Discretized workspace: an axis-aligned box of end-effector positions,
/// each probed with six axis-aligned approach orientations.
struct WorkspaceGrid {
  Eigen::Vector3d corner_min{-0.2, -0.8, 0.1};
  Eigen::Vector3d corner_max{0.2, 0.8, 1.7};
  double spacing = 0.1;
  std::array<Eigen::Quaterniond, 6> orientations;

  WorkspaceGrid();
  /// Inclusive axis samples; corners are exact when spacing divides extent.
  std::vector<double> axis_points(int axis) const;
  std::vector<Eigen::Vector3d> points() const;
  std::size_t pose_count() const { return points().size() * orientations.size(); }
};

/// Per-pose manipulability over a workspace grid plus the aggregate mean.
struct ManipField {
  WorkspaceGrid grid;
  std::vector<double> values;   // point-major, orientation-minor; 0 = unreachable
  double mu = 0.0;              // mean over all entries including zeros
  std::size_t reachable = 0;

  void finalize();              // recomputes mu and reachable from values
};

struct GlobalManipOptions {
  kin::IkParams ik;
  int workers = 0;  // 0 = library default
};

/// For every grid pose: one IK attempt from a random configuration
/// (deterministic per rng_seed and pose index); on success the whole-body
/// Jacobian (base planar DoF + torso + arm) manipulability, else zero.
ManipField global_manipulability(const model::RobotDescription& robot, const WorkspaceGrid& grid,
                                 std::uint64_t rng_seed, const GlobalManipOptions& options = {});

/// CSV export: header x,y,z,orientation_index,m; one row per pose; final
/// summary row `mu,,,,<value>`. Throws IoError.
void export_heatmap(const ManipField& field, const std::string& path);

/// Reads a heatmap CSV back; used for round-trip verification.
ManipField import_heatmap(const std::string& path);

}  // namespace codesign::manip
