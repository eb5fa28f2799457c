#include "codesign/sim/tasks.hpp"

#include <cmath>

#include "codesign/common/errors.hpp"
#include "codesign/common/rng.hpp"

namespace codesign::sim {

TaskId task_from_string(const std::string& s) {
  if (s == "random_goal" || s == "RandomGoal") return TaskId::RandomGoal;
  if (s == "random_obstacle" || s == "RandomObstacle") return TaskId::RandomObstacle;
  if (s == "pick_place" || s == "PickPlace") return TaskId::PickPlace;
  if (s == "door" || s == "Door") return TaskId::Door;
  if (s == "drawer" || s == "Drawer") return TaskId::Drawer;
  if (s == "cabinet" || s == "Cabinet") return TaskId::Cabinet;
  throw UnknownTask("unknown task '" + s + "'");
}

std::string to_string(TaskId id) {
  switch (id) {
    case TaskId::RandomGoal: return "random_goal";
    case TaskId::RandomObstacle: return "random_obstacle";
    case TaskId::PickPlace: return "pick_place";
    case TaskId::Door: return "door";
    case TaskId::Drawer: return "drawer";
    case TaskId::Cabinet: return "cabinet";
  }
  throw UnknownTask("invalid task id");
}

const std::vector<TaskId>& all_tasks() {
  static const std::vector<TaskId> tasks = {TaskId::RandomGoal, TaskId::RandomObstacle,
                                            TaskId::PickPlace,  TaskId::Door,
                                            TaskId::Drawer,     TaskId::Cabinet};
  return tasks;
}

bool TaskEpisode::operator==(const TaskEpisode& other) const {
  if (id != other.id || start_base != other.start_base ||
      max_trans_err != other.max_trans_err || max_rot_err != other.max_rot_err ||
      horizon != other.horizon || seed != other.seed ||
      door_open_fraction != other.door_open_fraction ||
      trajectory.speed != other.trajectory.speed || trajectory.kind != other.trajectory.kind ||
      trajectory.waypoints.size() != other.trajectory.waypoints.size())
    return false;
  for (std::size_t i = 0; i < trajectory.waypoints.size(); ++i) {
    const auto& a = trajectory.waypoints[i];
    const auto& b = other.trajectory.waypoints[i];
    if (a.position != b.position || a.orientation.coeffs() != b.orientation.coeffs()) return false;
  }
  return map == other.map;
}

namespace {

/// Goal pitch: top/bottom grasp at the band edges, moderate in between.
double goal_pitch(Rng& rng, double h, double lo, double hi, const TaskSamplerConfig& cfg) {
  if (h >= hi - cfg.edge_band) return cfg.top_grasp_pitch;
  if (h <= lo + cfg.edge_band) return cfg.bottom_grasp_pitch;
  return rng.uniform(-M_PI / 4, M_PI / 4);
}

Eigen::Quaterniond yaw_pitch(double yaw, double pitch) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
                            Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()));
}

/// End-effector anchor pose slightly ahead of the robot's start base pose;
/// trajectories begin here so any arm can settle onto them.
kin::Pose anchor_pose(const Eigen::Vector3d& base, const TaskSamplerConfig& cfg) {
  kin::Pose p;
  p.position = {base.x() + 0.5 * std::cos(base.z()), base.y() + 0.5 * std::sin(base.z()),
                cfg.anchor_height};
  p.orientation = yaw_pitch(base.z(), 0.0);
  return p;
}

OccupancyMap empty_map(const TaskSamplerConfig& cfg) {
  return OccupancyMap(cfg.map_half_extent, cfg.cell_size);
}

/// Clearance disc check: every cell within `clearance` of (x, y) is free,
/// so any base yaw fits (clearance >= footprint circumradius).
bool base_spot_free(const OccupancyMap& map, double x, double y, double clearance) {
  if (!map.in_bounds(x, y)) return false;
  const double step = map.cell_size();
  for (double dx = -clearance; dx <= clearance; dx += step)
    for (double dy = -clearance; dy <= clearance; dy += step)
      if (dx * dx + dy * dy <= clearance * clearance && map.occupied_at(x + dx, y + dy))
        return false;
  return true;
}

Eigen::Vector3d sample_free_base(Rng& rng, const OccupancyMap& map, double extent,
                                 double clearance) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    const double x = rng.uniform(-extent, extent);
    const double y = rng.uniform(-extent, extent);
    if (!base_spot_free(map, x, y, clearance)) continue;
    return {x, y, rng.uniform(-M_PI, M_PI)};
  }
  return {0, 0, 0};
}

/// Inserts one obstacle between `from` and `to` without covering either end.
void insert_path_obstacle(Rng& rng, OccupancyMap& map, const Eigen::Vector2d& from,
                          const Eigen::Vector2d& to, const TaskSamplerConfig& cfg) {
  const double t = rng.uniform(0.38, 0.62);
  const Eigen::Vector2d dir = (to - from).normalized();
  const Eigen::Vector2d lateral(-dir.y(), dir.x());
  const Eigen::Vector2d c =
      from + t * (to - from) + rng.uniform(-0.3, 0.3) * lateral;
  const double half = cfg.obstacle_size / 2;
  if ((c - from).norm() < half + 0.65 || (c - to).norm() < half + 0.65) return;
  ObstacleRect o;
  o.min = c - Eigen::Vector2d(half, half);
  o.max = c + Eigen::Vector2d(half, half);
  o.top = 0.75;
  map.add_obstacle(o);
}

TaskEpisode sample_random_goal(Rng& rng, const TaskSamplerConfig& cfg) {
  TaskEpisode ep;
  ep.id = TaskId::RandomGoal;
  ep.map = empty_map(cfg);
  ep.start_base = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-M_PI, M_PI)};
  const kin::Pose anchor = anchor_pose(ep.start_base, cfg);

  const double h = rng.uniform(cfg.goal_height_min, cfg.goal_height_max);
  const double dist = rng.uniform(0.9, 2.2);
  const double dir = rng.uniform(-M_PI, M_PI);
  kin::Pose goal;
  goal.position = {anchor.position.x() + dist * std::cos(dir),
                   anchor.position.y() + dist * std::sin(dir), h};
  const double pitch = goal_pitch(rng, h, cfg.goal_height_min, cfg.goal_height_max, cfg);
  goal.orientation = yaw_pitch(rng.uniform(-M_PI, M_PI), pitch);

  ep.trajectory.kind = TrajKind::line;
  ep.trajectory.speed = cfg.ee_speed;
  ep.trajectory.waypoints = {anchor, goal};
  return ep;
}

TaskEpisode sample_random_obstacle(Rng& rng, const TaskSamplerConfig& cfg) {
  TaskEpisode ep;
  ep.id = TaskId::RandomObstacle;
  for (int attempt = 0; attempt < 100; ++attempt) {
    OccupancyMap map = empty_map(cfg);
    // Jittered obstacle lattice with the configured spacing.
    const double spacing = cfg.obstacle_spacing;
    const double half = cfg.obstacle_size / 2;
    for (double cx = -cfg.map_half_extent + spacing; cx < cfg.map_half_extent - 0.5;
         cx += spacing) {
      for (double cy = -cfg.map_half_extent + spacing; cy < cfg.map_half_extent - 0.5;
           cy += spacing) {
        const Eigen::Vector2d c(cx + rng.uniform(-0.25, 0.25), cy + rng.uniform(-0.25, 0.25));
        ObstacleRect o;
        o.min = c - Eigen::Vector2d(half, half);
        o.max = c + Eigen::Vector2d(half, half);
        o.top = rng.uniform() < 0.5 ? 0.75 : 2.0;
        map.add_obstacle(o);
      }
    }
    const Eigen::Vector3d start = sample_free_base(rng, map, cfg.map_half_extent - 1.2, 0.72);
    const kin::Pose anchor = anchor_pose(start, cfg);
    const double h = rng.uniform(cfg.goal_height_min, cfg.goal_height_max);
    kin::Pose goal;
    const Eigen::Vector3d goal_spot = sample_free_base(rng, map, cfg.map_half_extent - 1.2, 0.72);
    goal.position = {goal_spot.x(), goal_spot.y(), h};
    goal.orientation = yaw_pitch(rng.uniform(-M_PI, M_PI),
                                 goal_pitch(rng, h, cfg.goal_height_min, cfg.goal_height_max, cfg));
    if ((goal.position.head<2>() - anchor.position.head<2>()).norm() < 1.5) continue;
    auto traj = plan_ee_path(map, anchor, goal);
    if (!traj) continue;
    ep.map = map;
    ep.start_base = start;
    ep.trajectory = *traj;
    ep.trajectory.speed = cfg.ee_speed;
    return ep;
  }
  // Degenerate fallback: empty map, straight line (keeps sampling total).
  ep.map = empty_map(cfg);
  ep.start_base = {0, 0, 0};
  const kin::Pose anchor = anchor_pose(ep.start_base, cfg);
  kin::Pose goal = anchor;
  goal.position.x() += 1.5;
  ep.trajectory.kind = TrajKind::planner;
  ep.trajectory.speed = cfg.ee_speed;
  ep.trajectory.waypoints = {anchor, goal};
  return ep;
}

TaskEpisode sample_pick_place(Rng& rng, const TaskSamplerConfig& cfg) {
  TaskEpisode ep;
  ep.id = TaskId::PickPlace;
  OccupancyMap map = empty_map(cfg);

  const Eigen::Vector2d pick_xy(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  const double place_dir = rng.uniform(-M_PI, M_PI);
  const double place_dist = rng.uniform(1.6, 2.6);
  const Eigen::Vector2d place_xy = pick_xy + place_dist * Eigen::Vector2d(std::cos(place_dir),
                                                                          std::sin(place_dir));
  const double h_pick = rng.uniform(cfg.goal_height_min, cfg.goal_height_max);
  const double h_place = rng.uniform(cfg.goal_height_min, cfg.goal_height_max);

  // Tables block the base only; the arm reaches over them.
  auto add_table = [&](const Eigen::Vector2d& c) {
    ObstacleRect o;
    o.min = c - Eigen::Vector2d(0.35, 0.25);
    o.max = c + Eigen::Vector2d(0.35, 0.25);
    o.blocks_ee = false;
    map.add_obstacle(o);
  };
  add_table(pick_xy);
  add_table(place_xy);
  if (cfg.insert_path_obstacle) insert_path_obstacle(rng, map, pick_xy, place_xy, cfg);

  // Start behind the pick table, far enough that any yaw fits.
  const Eigen::Vector2d approach = (pick_xy - place_xy).normalized();
  Eigen::Vector2d start_xy = pick_xy + 1.35 * approach;
  for (double dist = 1.35; dist <= 2.5; dist += 0.2) {
    start_xy = pick_xy + dist * approach;
    if (base_spot_free(map, start_xy.x(), start_xy.y(), 0.72)) break;
  }
  ep.start_base = {start_xy.x(), start_xy.y(),
                   std::atan2(pick_xy.y() - start_xy.y(), pick_xy.x() - start_xy.x())};

  const double pitch_pick = goal_pitch(rng, h_pick, cfg.goal_height_min, cfg.goal_height_max, cfg);
  const double pitch_place = goal_pitch(rng, h_place, cfg.goal_height_min, cfg.goal_height_max, cfg);
  const double yaw_pick = std::atan2(-approach.y(), -approach.x());

  kin::Pose pick;
  pick.position = {pick_xy.x(), pick_xy.y(), h_pick};
  pick.orientation = yaw_pitch(yaw_pick, pitch_pick);
  kin::Pose lift = pick;
  lift.position.z() = std::min(h_pick + 0.15, cfg.goal_height_max);
  kin::Pose place;
  place.position = {place_xy.x(), place_xy.y(), h_place};
  place.orientation = yaw_pitch(yaw_pick, pitch_place);
  kin::Pose pre_place = place;
  pre_place.position.z() = std::min(h_place + 0.15, cfg.goal_height_max);
  kin::Pose transfer;
  transfer.position = {(pick_xy.x() + place_xy.x()) / 2, (pick_xy.y() + place_xy.y()) / 2,
                       std::max(lift.position.z(), pre_place.position.z())};
  transfer.orientation = pick.orientation.slerp(0.5, place.orientation);

  ep.map = map;
  ep.trajectory.kind = TrajKind::line;
  ep.trajectory.speed = cfg.ee_speed;
  ep.trajectory.waypoints = {pick, lift, transfer, pre_place, place};
  return ep;
}

TaskEpisode sample_drawer_or_cabinet(Rng& rng, const TaskSamplerConfig& cfg, TaskId id) {
  TaskEpisode ep;
  ep.id = id;
  OccupancyMap map = empty_map(cfg);

  const double lo = id == TaskId::Drawer ? cfg.drawer_height_min : cfg.cabinet_height_min;
  const double hi = id == TaskId::Drawer ? cfg.drawer_height_max : cfg.cabinet_height_max;
  const double h = rng.uniform(lo, hi);

  // Object (dresser/cabinet front) placed at a random yaw; handle at its
  // front face, outward normal toward the approach area.
  const Eigen::Vector2d obj_xy(rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8));
  const double normal_yaw = rng.uniform(-M_PI, M_PI);
  const Eigen::Vector2d normal(std::cos(normal_yaw), std::sin(normal_yaw));

  // Body behind the handle blocks the base; the handle face stays clear.
  ObstacleRect body;
  const Eigen::Vector2d body_center = obj_xy - 0.45 * normal;
  body.min = body_center - Eigen::Vector2d(0.4, 0.4);
  body.max = body_center + Eigen::Vector2d(0.4, 0.4);
  body.blocks_ee = false;
  map.add_obstacle(body);

  kin::Pose object;
  object.position = {obj_xy.x(), obj_xy.y(), h};
  object.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(normal_yaw, Eigen::Vector3d::UnitZ()));

  ArticulatedParams params;
  params.speed = cfg.ee_speed;
  params.pull_length = cfg.drawer_pull;
  params.radius = id == TaskId::Drawer ? cfg.door_radius : cfg.cabinet_radius;
  params.side = rng.uniform() < 0.5 ? HingeSide::left : HingeSide::right;
  ep.trajectory = articulated_trajectory(id == TaskId::Drawer ? TrajKind::drawer : TrajKind::cabinet,
                                         object, params);
  ep.trajectory.speed = cfg.ee_speed;

  const double side_angle = rng.uniform(-0.9, 0.9);
  const Eigen::Vector2d start_dir(std::cos(normal_yaw + side_angle),
                                  std::sin(normal_yaw + side_angle));
  Eigen::Vector2d start_xy = obj_xy + rng.uniform(1.5, 2.1) * start_dir;
  for (double dist = 1.5; dist <= 2.7; dist += 0.2) {
    if (base_spot_free(map, start_xy.x(), start_xy.y(), 0.72)) break;
    start_xy = obj_xy + dist * start_dir;
  }
  ep.start_base = {start_xy.x(), start_xy.y(),
                   std::atan2(obj_xy.y() - start_xy.y(), obj_xy.x() - start_xy.x())};
  if (cfg.insert_path_obstacle) insert_path_obstacle(rng, map, start_xy, obj_xy, cfg);
  ep.map = map;
  return ep;
}

TaskEpisode sample_door(Rng& rng, const TaskSamplerConfig& cfg) {
  TaskEpisode ep;
  ep.id = TaskId::Door;
  OccupancyMap map = empty_map(cfg);

  const double wall_x = rng.uniform(-0.4, 0.4);
  const double gap_center = rng.uniform(-0.6, 0.6);
  const double gap_lo = gap_center - cfg.door_gap / 2;
  const double gap_hi = gap_center + cfg.door_gap / 2;
  const double h = rng.uniform(0.9, 1.05);  // handle height

  ObstacleRect wall_a, wall_b, leaf;
  wall_a.min = {wall_x - 0.06, -cfg.map_half_extent};
  wall_a.max = {wall_x + 0.06, gap_lo};
  wall_a.top = 2.0;
  wall_b.min = {wall_x - 0.06, gap_hi};
  wall_b.max = {wall_x + 0.06, cfg.map_half_extent};
  wall_b.top = 2.0;
  leaf.min = {wall_x - 0.04, gap_lo};
  leaf.max = {wall_x + 0.04, gap_hi};
  leaf.top = 2.0;
  leaf.blocks_ee = false;  // the hand grasps the handle on the leaf
  leaf.is_door_leaf = true;
  map.add_obstacle(wall_a);
  map.add_obstacle(wall_b);
  map.add_obstacle(leaf);

  // Hinge on the +y jamb; handle near the -y edge of the leaf; door swings
  // toward the robot (-x side).
  kin::Pose object;
  object.position = {wall_x, gap_lo + (cfg.door_gap - cfg.door_radius), h};
  object.orientation =
      Eigen::Quaterniond(Eigen::AngleAxisd(M_PI, Eigen::Vector3d::UnitZ()));  // normal -> -x
  ArticulatedParams params;
  params.radius = cfg.door_radius;
  params.side = HingeSide::right;  // hinge toward +y in world = right of the -x normal
  params.speed = cfg.ee_speed;
  EETrajectory arc = articulated_trajectory(TrajKind::door, object, params);

  // After the swing, pass through the frame to the far side.
  kin::Pose through;
  through.position = {wall_x + 0.9, gap_center, h};
  through.orientation = yaw_pitch(0.0, 0.0);
  ep.trajectory = arc;
  ep.trajectory.kind = TrajKind::door;
  ep.trajectory.waypoints.push_back(through);
  ep.trajectory.speed = cfg.ee_speed;
  const double arc_len = arc.length();
  ep.door_open_fraction = arc_len / (arc_len + (through.position - arc.back().position).norm());

  ep.start_base = {wall_x - rng.uniform(1.8, 2.4), gap_center + rng.uniform(-0.5, 0.5), 0.0};
  ep.start_base.z() = std::atan2(object.position.y() - ep.start_base.y(),
                                 object.position.x() - ep.start_base.x());
  ep.map = map;
  return ep;
}

}  // namespace

TaskEpisode sample_episode(TaskId id, const TaskSamplerConfig& config, std::uint64_t seed) {
  Rng rng(seed_mix(seed, static_cast<std::uint64_t>(id) + 101));
  TaskEpisode ep;
  switch (id) {
    case TaskId::RandomGoal: ep = sample_random_goal(rng, config); break;
    case TaskId::RandomObstacle: ep = sample_random_obstacle(rng, config); break;
    case TaskId::PickPlace: ep = sample_pick_place(rng, config); break;
    case TaskId::Door: ep = sample_door(rng, config); break;
    case TaskId::Drawer: ep = sample_drawer_or_cabinet(rng, config, TaskId::Drawer); break;
    case TaskId::Cabinet: ep = sample_drawer_or_cabinet(rng, config, TaskId::Cabinet); break;
    default: throw UnknownTask("invalid task id");
  }
  ep.max_trans_err = config.max_trans_err;
  ep.max_rot_err = config.max_rot_err;
  ep.horizon = config.horizon;
  ep.seed = seed;
  return ep;
}

}  // namespace codesign::sim
