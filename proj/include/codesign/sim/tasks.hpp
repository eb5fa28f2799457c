#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codesign/sim/occupancy.hpp"
#include "codesign/sim/trajectory.hpp"

namespace codesign::sim {

enum class TaskId { RandomGoal, RandomObstacle, PickPlace, Door, Drawer, Cabinet };

TaskId task_from_string(const std::string& s);
std::string to_string(TaskId id);
const std::vector<TaskId>& all_tasks();

/// Episode generation parameters. Height bands follow household reach
/// studies; obstacle spacing of 1.7 m matches the training setting for
/// narrow-passage behavior.
struct TaskSamplerConfig {
  double goal_height_min = 0.1;       // m, RandomGoal / PickPlace band
  double goal_height_max = 1.7;
  double drawer_height_min = 0.4;     // m
  double drawer_height_max = 1.2;
  double cabinet_height_min = 0.4;    // m
  double cabinet_height_max = 1.7;
  double edge_band = 0.1;             // m, top/bottom grasp zone at band edges
  double top_grasp_pitch = M_PI / 2;  // approach from above
  double bottom_grasp_pitch = -M_PI / 2;
  double obstacle_spacing = 2.0;      // m, RandomObstacle lattice (1.7 in training)
  double obstacle_size = 0.35;        // m, square obstacle edge
  double map_half_extent = 5.0;       // m
  double cell_size = 0.05;            // m
  bool insert_path_obstacle = true;   // extra obstacle between robot and object
  double door_gap = 1.0;              // m
  double door_radius = 0.72;          // m, hinge to handle
  double drawer_pull = 0.3;           // m
  double cabinet_radius = 0.45;       // m
  double ee_speed = 0.35;             // m/s nominal trajectory speed
  double anchor_height = 0.9;         // m, trajectory start height near the robot
  double max_trans_err = 0.1;         // m, tracking threshold
  double max_rot_err = 0.7854;        // rad
  int horizon = 1500;                 // steps
};

/// One sampled task instance. Everything needed to simulate it: the map,
/// the robot's start pose, the end-effector motion and success thresholds.
struct TaskEpisode {
  TaskId id = TaskId::RandomGoal;
  OccupancyMap map;
  Eigen::Vector3d start_base{0, 0, 0};  // x, y, yaw
  EETrajectory trajectory;
  double max_trans_err = 0.1;
  double max_rot_err = 0.7854;
  int horizon = 1000;
  std::uint64_t seed = 0;
  /// Door episodes: progress fraction past which the leaf opens.
  double door_open_fraction = -1.0;

  bool operator==(const TaskEpisode& other) const;
};

/// Deterministically samples an episode: the same (task, config, seed)
/// produce bit-identical episodes. Throws UnknownTask for invalid ids.
TaskEpisode sample_episode(TaskId id, const TaskSamplerConfig& config, std::uint64_t seed);

}  // namespace codesign::sim
