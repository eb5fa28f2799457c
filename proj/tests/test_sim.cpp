#include <cmath>
#include <queue>

#include "doctest.h"

#include "codesign/common/errors.hpp"
#include "codesign/common/rng.hpp"
#include "codesign/sim/episode_io.hpp"
#include "codesign/sim/simulator.hpp"
#include "codesign/sim/tasks.hpp"
#include "codesign/sim/trajectory.hpp"
#include "helpers.hpp"

using namespace codesign;
using namespace codesign::sim;

namespace {

/// Dijkstra over the same 8-connected, no-corner-cutting grid graph used by
/// the planner; the oracle for A* optimality.
std::optional<double> dijkstra_cost(const OccupancyMap& map, const Eigen::Vector2d& start,
                                    const Eigen::Vector2d& goal, double inflation) {
  const int w = map.width(), h = map.height();
  const int r = static_cast<int>(std::ceil(inflation / map.cell_size()));
  std::vector<std::uint8_t> blocked(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!map.cell_occupied(x, y)) continue;
      for (int oy = -r; oy <= r; ++oy)
        for (int ox = -r; ox <= r; ++ox) {
          const int nx = x + ox, ny = y + oy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          if ((ox * ox + oy * oy) * map.cell_size() * map.cell_size() <= inflation * inflation)
            blocked[static_cast<std::size_t>(ny) * w + static_cast<std::size_t>(nx)] = 1;
        }
    }
  auto is_blocked = [&](int x, int y) {
    return x < 0 || y < 0 || x >= w || y >= h ||
           blocked[static_cast<std::size_t>(y) * w + static_cast<std::size_t>(x)] != 0;
  };
  int sx, sy, gx, gy;
  map.world_to_cell(start.x(), start.y(), sx, sy);
  map.world_to_cell(goal.x(), goal.y(), gx, gy);
  if (is_blocked(sx, sy) || is_blocked(gx, gy)) return std::nullopt;

  const double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(blocked.size(), kInf);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;
  dist[static_cast<std::size_t>(sy) * w + sx] = 0;
  open.push({0.0, sy * w + sx});
  static const int dx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static const int dy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  while (!open.empty()) {
    auto [d, idx] = open.top();
    open.pop();
    if (d > dist[static_cast<std::size_t>(idx)] + 1e-12) continue;
    const int x = idx % w, y = idx / w;
    for (int k = 0; k < 8; ++k) {
      const int nx = x + dx[k], ny = y + dy[k];
      if (is_blocked(nx, ny)) continue;
      if (k >= 4 && (is_blocked(x + dx[k], y) || is_blocked(x, y + dy[k]))) continue;
      const double nd = d + (k < 4 ? 1.0 : std::sqrt(2.0));
      if (nd < dist[static_cast<std::size_t>(ny) * w + nx] - 1e-12) {
        dist[static_cast<std::size_t>(ny) * w + nx] = nd;
        open.push({nd, ny * w + nx});
      }
    }
  }
  const double d = dist[static_cast<std::size_t>(gy) * w + gx];
  if (d == kInf) return std::nullopt;
  return d * map.cell_size();
}

}  // namespace

TEST_SUITE("occupancy") {

TEST_CASE("rasterization matches the rectangle list within one cell") {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    OccupancyMap map(2.0, 0.05);
    ObstacleRect o;
    const Eigen::Vector2d c(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Eigen::Vector2d half(rng.uniform(0.1, 0.5), rng.uniform(0.1, 0.5));
    o.min = c - half;
    o.max = c + half;
    map.add_obstacle(o);
    for (int probe = 0; probe < 50; ++probe) {
      const double x = rng.uniform(-1.9, 1.9), y = rng.uniform(-1.9, 1.9);
      const bool rect = o.contains(x, y);
      const bool raster = map.occupied_at(x, y);
      if (rect != raster) {
        // Disagreement only within one cell of the boundary.
        const double dx = std::max({o.min.x() - x, x - o.max.x(), 0.0});
        const double dy = std::max({o.min.y() - y, y - o.max.y(), 0.0});
        const double boundary_dist =
            rect ? std::min({x - o.min.x(), o.max.x() - x, y - o.min.y(), o.max.y() - y})
                 : std::hypot(dx, dy);
        CHECK(boundary_dist <= map.cell_size() * std::sqrt(2.0));
      }
    }
  }
}

TEST_CASE("footprint collision agrees with the rectangle list within one cell") {
  Rng rng(77);
  OccupancyMap map(3.0, 0.05);
  ObstacleRect o;
  o.min = {0.5, -0.4};
  o.max = {1.1, 0.3};
  map.add_obstacle(o);
  const Eigen::Vector2d half(0.3, 0.2);
  // Oracle: dense sampling of the obstacle rectangle (padded by `pad`)
  // against the rotated footprint (also padded by `pad`).
  auto rect_overlap = [&](double x, double y, double yaw, double pad) {
    const double c = std::cos(yaw), s = std::sin(yaw);
    for (double ox = o.min.x() - pad; ox <= o.max.x() + pad + 1e-9; ox += 0.01) {
      for (double oy = o.min.y() - pad; oy <= o.max.y() + pad + 1e-9; oy += 0.01) {
        const double dx = ox - x, dy = oy - y;
        const double lx = c * dx + s * dy, ly = -s * dx + c * dy;
        if (std::abs(lx) <= half.x() + pad && std::abs(ly) <= half.y() + pad) return true;
      }
    }
    return false;
  };
  const double pad = map.cell_size() * std::sqrt(2.0);
  for (int trial = 0; trial < 300; ++trial) {
    const double x = rng.uniform(-2, 2), y = rng.uniform(-2, 2), yaw = rng.uniform(-M_PI, M_PI);
    const bool hit = map.footprint_collides(x, y, yaw, half);
    if (hit) {
      // Sound within tolerance: a reported collision implies a real overlap
      // of the padded shapes.
      CHECK(rect_overlap(x, y, yaw, pad));
    } else {
      // Complete within tolerance: a clear overlap of the shrunken shapes
      // must have been reported.
      CHECK(!rect_overlap(x, y, yaw, -pad));
    }
  }
}

TEST_CASE("ee disc collision respects obstacle height") {
  OccupancyMap map(2.0, 0.05);
  ObstacleRect table;
  table.min = {0.0, 0.0};
  table.max = {0.5, 0.5};
  table.top = 0.75;
  map.add_obstacle(table);
  CHECK(map.disc_collides(0.25, 0.25, 0.5, 0.05));
  CHECK(!map.disc_collides(0.25, 0.25, 0.9, 0.05));   // above the obstacle
  CHECK(!map.disc_collides(1.0, 1.0, 0.5, 0.05));     // clear of it
  ObstacleRect base_only = table;
  base_only.min = {1.0, 1.0};
  base_only.max = {1.5, 1.5};
  base_only.blocks_ee = false;
  map.add_obstacle(base_only);
  CHECK(!map.disc_collides(1.25, 1.25, 0.3, 0.05));
}

}  // TEST_SUITE

TEST_SUITE("trajectory") {

TEST_CASE("drawer pull displaces the end waypoint along the normal") {
  kin::Pose object;
  object.position = {1.0, 0.5, 0.8};
  object.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(0.7, Eigen::Vector3d::UnitZ()));
  ArticulatedParams params;
  params.pull_length = 0.3;
  EETrajectory traj = articulated_trajectory(TrajKind::drawer, object, params);
  const Eigen::Vector3d normal = object.orientation * Eigen::Vector3d::UnitX();
  CHECK((traj.back().position - (object.position + 0.3 * normal)).norm() < 1e-12);
  for (const auto& w : traj.waypoints)
    CHECK(w.orientation.angularDistance(object.orientation) < 1e-12);
  CHECK(traj.length() == doctest::Approx(0.3));
}

TEST_CASE("cabinet arc chord matches circle geometry") {
  kin::Pose object;
  ArticulatedParams params;
  params.radius = 0.5;
  params.opening_angle = M_PI / 2;
  EETrajectory traj = articulated_trajectory(TrajKind::cabinet, object, params);
  const double chord = (traj.back().position - traj.front().position).norm();
  CHECK(chord == doctest::Approx(0.5 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("left and right hinges mirror across the object plane") {
  kin::Pose object;
  object.position = {0.4, -0.2, 1.0};
  ArticulatedParams left, right;
  left.side = HingeSide::left;
  right.side = HingeSide::right;
  EETrajectory tl = articulated_trajectory(TrajKind::door, object, left);
  EETrajectory tr = articulated_trajectory(TrajKind::door, object, right);
  REQUIRE(tl.waypoints.size() == tr.waypoints.size());
  for (std::size_t i = 0; i < tl.waypoints.size(); ++i) {
    const Eigen::Vector3d a = tl.waypoints[i].position - object.position;
    const Eigen::Vector3d b = tr.waypoints[i].position - object.position;
    CHECK(a.x() == doctest::Approx(b.x()).epsilon(1e-12));
    CHECK(a.y() == doctest::Approx(-b.y()).epsilon(1e-12));
    CHECK(a.z() == doctest::Approx(b.z()).epsilon(1e-12));
  }
}

TEST_CASE("bad articulated parameters are rejected") {
  kin::Pose object;
  ArticulatedParams params;
  params.pull_length = -1.0;
  CHECK_THROWS_AS(articulated_trajectory(TrajKind::drawer, object, params), BadParams);
}

TEST_CASE("planner returns a straight sequence on an empty map") {
  OccupancyMap map(3.0, 0.05);
  kin::Pose start, goal;
  start.position = {-2.0, 0.0, 0.9};
  goal.position = {2.0, 0.0, 0.9};
  auto traj = plan_ee_path(map, start, goal, {0.1});
  REQUIRE(traj.has_value());
  CHECK(traj->kind == TrajKind::planner);
  for (const auto& w : traj->waypoints) CHECK(std::abs(w.position.y()) < 0.05);
  CHECK((traj->front().position - start.position).norm() < 1e-12);
  CHECK((traj->back().position - goal.position).norm() < 1e-12);
}

TEST_CASE("planner reports no path for an enclosed goal") {
  OccupancyMap map(3.0, 0.05);
  ObstacleRect ring;
  ring.min = {0.5, 0.5};
  ring.max = {2.5, 2.5};
  map.add_obstacle(ring);  // goal strictly inside a solid block
  kin::Pose start, goal;
  start.position = {-2.0, -2.0, 0.9};
  goal.position = {1.5, 1.5, 0.9};
  CHECK(!plan_ee_path(map, start, goal, {0.1}).has_value());
}

TEST_CASE("a-star cost equals dijkstra cost on random maps") {
  Rng rng(2024);
  int compared = 0;
  for (int trial = 0; trial < 20; ++trial) {
    OccupancyMap map(3.0, 0.1);
    const int n_obstacles = 3 + static_cast<int>(rng.uniform_int(5));
    for (int o = 0; o < n_obstacles; ++o) {
      ObstacleRect rect;
      const Eigen::Vector2d c(rng.uniform(-2, 2), rng.uniform(-2, 2));
      const Eigen::Vector2d half(rng.uniform(0.1, 0.6), rng.uniform(0.1, 0.6));
      rect.min = c - half;
      rect.max = c + half;
      map.add_obstacle(rect);
    }
    const Eigen::Vector2d start(-2.6, rng.uniform(-2.5, 2.5));
    const Eigen::Vector2d goal(2.6, rng.uniform(-2.5, 2.5));
    const double inflation = 0.15;
    const auto astar_cost = plan_path_cost(map, start, goal, {inflation});
    const auto oracle = dijkstra_cost(map, start, goal, inflation);
    REQUIRE(astar_cost.has_value() == oracle.has_value());
    if (astar_cost) {
      CHECK(*astar_cost == doctest::Approx(*oracle).epsilon(1e-9));
      ++compared;
    }
  }
  CHECK(compared > 5);
}

TEST_CASE("pose_at interpolates positions and clamps") {
  EETrajectory traj;
  kin::Pose a, b;
  a.position = {0, 0, 0};
  b.position = {2, 0, 0};
  b.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(1.0, Eigen::Vector3d::UnitZ()));
  traj.waypoints = {a, b};
  CHECK(traj.length() == doctest::Approx(2.0));
  CHECK((traj.pose_at(1.0).position - Eigen::Vector3d(1, 0, 0)).norm() < 1e-12);
  CHECK((traj.pose_at(-1.0).position - a.position).norm() == 0.0);
  CHECK((traj.pose_at(5.0).position - b.position).norm() == 0.0);
}

}  // TEST_SUITE

TEST_SUITE("tasks") {

TEST_CASE("same seed yields bit-identical episodes") {
  TaskSamplerConfig cfg;
  for (TaskId id : all_tasks()) {
    TaskEpisode a = sample_episode(id, cfg, 7);
    TaskEpisode b = sample_episode(id, cfg, 7);
    CHECK(a == b);
    TaskEpisode c = sample_episode(id, cfg, 8);
    CHECK(!(a == c));
  }
}

TEST_CASE("drawer heights stay inside the band over 10000 samples") {
  TaskSamplerConfig cfg;
  double lo = 1e9, hi = -1e9;
  for (int i = 0; i < 10000; ++i) {
    TaskEpisode ep = sample_episode(TaskId::Drawer, cfg, static_cast<std::uint64_t>(i));
    const double h = ep.trajectory.front().position.z();
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  CHECK(lo >= cfg.drawer_height_min);
  CHECK(hi <= cfg.drawer_height_max);
  CHECK(lo < cfg.drawer_height_min + 0.05);  // band actually covered
  CHECK(hi > cfg.drawer_height_max - 0.05);
}

TEST_CASE("goal at the top of the band uses the top-grasp pitch") {
  TaskSamplerConfig cfg;
  cfg.goal_height_min = 1.7;
  cfg.goal_height_max = 1.7;
  // Degenerate band: every goal sits at 1.7 m, inside the top edge zone.
  for (int i = 0; i < 10; ++i) {
    TaskEpisode ep = sample_episode(TaskId::RandomGoal, cfg, static_cast<std::uint64_t>(i));
    // Grasp approach axis = EE frame x; pitch +pi/2 points it straight down.
    const Eigen::Vector3d approach =
        ep.trajectory.back().orientation * Eigen::Vector3d::UnitX();
    CHECK(approach.z() == doctest::Approx(-std::sin(cfg.top_grasp_pitch)).epsilon(1e-9));
  }
}

TEST_CASE("unknown task strings are rejected") {
  CHECK_THROWS_AS(task_from_string("juggling"), UnknownTask);
  CHECK(task_from_string("drawer") == TaskId::Drawer);
  CHECK(to_string(TaskId::Cabinet) == "cabinet");
}

TEST_CASE("episodes serialize and replay bit-for-bit") {
  TaskSamplerConfig cfg;
  for (TaskId id : all_tasks()) {
    TaskEpisode ep = sample_episode(id, cfg, 99);
    TaskEpisode back = episode_from_text(episode_to_text(ep));
    CHECK(back == ep);
  }
}

TEST_CASE("random obstacle maps honor the configured spacing") {
  TaskSamplerConfig cfg;
  cfg.obstacle_spacing = 1.7;
  TaskEpisode ep = sample_episode(TaskId::RandomObstacle, cfg, 3);
  CHECK(ep.map.obstacles().size() > 10);  // a 10 m map at 1.7 m spacing
  CHECK(ep.trajectory.kind == TrajKind::planner);
}

}  // TEST_SUITE

TEST_SUITE("simulator") {

TEST_CASE("constant twist integration matches the closed form for both drives") {
  for (auto drive : {model::DriveType::omni, model::DriveType::differential}) {
    auto robot = test_helpers::load_asset_robot(
        drive == model::DriveType::omni ? "fmm_franka.robot" : "fmm_franka_diff.robot");
    TaskSamplerConfig cfg;
    TaskEpisode ep = sample_episode(TaskId::RandomGoal, cfg, 1);
    ep.map = OccupancyMap(50.0, 0.25);  // huge empty map: no collisions
    ep.start_base = {0, 0, 0.3};
    Simulator sim(robot, ep);
    SimState state = sim.initial_state();
    Eigen::Vector3d twist(0.6, drive == model::DriveType::omni ? 0.25 : 0.0, 0.4);
    ControlCommand cmd;
    cmd.base_twist = twist;
    const kin::Pose hold = sim.ee_world_pose(state);
    const double dt = 0.02;
    for (int i = 0; i < 1000; ++i) {
      auto failure = sim.step(state, cmd, hold, dt);
      REQUIRE(!failure.has_value());
    }
    const Eigen::Vector3d expected = constant_twist_pose({0, 0, 0.3}, twist, 1000 * dt);
    CHECK((state.base - expected).norm() < 1e-9);
  }
}

TEST_CASE("differential drive ignores lateral velocity") {
  auto robot = test_helpers::load_asset_robot("fmm_franka_diff.robot");
  TaskSamplerConfig cfg;
  TaskEpisode ep = sample_episode(TaskId::RandomGoal, cfg, 2);
  ep.map = OccupancyMap(50.0, 0.25);
  ep.start_base = {0, 0, 0};
  Simulator sim(robot, ep);
  SimState state = sim.initial_state();
  ControlCommand cmd;
  cmd.base_twist = {0.0, 0.8, 0.0};  // pure lateral: projected away
  const kin::Pose hold = sim.ee_world_pose(state);
  for (int i = 0; i < 100; ++i) REQUIRE(!sim.step(state, cmd, hold, 0.02).has_value());
  CHECK(state.base.head<2>().norm() < 1e-12);
}

TEST_CASE("zero commands leave the state unchanged except time") {
  auto robot = test_helpers::load_asset_robot("fmm_franka.robot");
  TaskSamplerConfig cfg;
  TaskEpisode ep = sample_episode(TaskId::RandomGoal, cfg, 3);
  ep.start_base = {0, 0, 0};
  Simulator sim(robot, ep);
  SimState state = sim.initial_state();
  const kin::JointConfig q0 = state.q;
  const kin::Pose hold = sim.ee_world_pose(state);
  ControlCommand cmd;  // all zeros
  auto failure = sim.step(state, cmd, hold, 0.02);
  REQUIRE(!failure.has_value());
  CHECK(state.base.norm() == 0.0);
  CHECK((state.q - q0).norm() < 1e-12);
  CHECK(state.time == doctest::Approx(0.02));
}

TEST_CASE("driving into an occupied cell fails with a collision") {
  auto robot = test_helpers::load_asset_robot("fmm_franka.robot");
  TaskSamplerConfig cfg;
  TaskEpisode ep = sample_episode(TaskId::RandomGoal, cfg, 4);
  OccupancyMap map(5.0, 0.05);
  ObstacleRect wall;
  wall.min = {1.0, -2.0};
  wall.max = {1.3, 2.0};
  map.add_obstacle(wall);
  ep.map = map;
  ep.start_base = {-0.5, 0, 0};
  Simulator sim(robot, ep);
  SimState state = sim.initial_state();
  ControlCommand cmd;
  cmd.base_twist = {1.0, 0, 0};
  const kin::Pose hold = sim.ee_world_pose(state);
  bool collided = false;
  for (int i = 0; i < 200; ++i) {
    auto failure = sim.step(state, cmd, hold, 0.02);
    if (failure) {
      CHECK(*failure == FailureKind::collision);
      collided = true;
      break;
    }
  }
  CHECK(collided);
}

TEST_CASE("start pose overlapping an obstacle fails immediately") {
  auto robot = test_helpers::load_asset_robot("fmm_franka.robot");
  TaskSamplerConfig cfg;
  TaskEpisode ep = sample_episode(TaskId::RandomGoal, cfg, 5);
  OccupancyMap map(5.0, 0.05);
  ObstacleRect block;
  block.min = {-0.3, -0.3};
  block.max = {0.3, 0.3};
  map.add_obstacle(block);
  ep.map = map;
  ep.start_base = {0, 0, 0};
  auto result = run_episode(robot, ep, [](const SimState&, const ControlContext&) {
    return ControlCommand{};
  });
  CHECK(!result.success);
  CHECK(result.failure == FailureKind::collision);
  CHECK(result.steps == 0);
}

TEST_CASE("zero-length trajectory from a feasible start succeeds in <= 1 step") {
  auto robot = test_helpers::load_asset_robot("fmm_franka.robot");
  TaskSamplerConfig cfg;
  TaskEpisode ep = sample_episode(TaskId::RandomGoal, cfg, 6);
  ep.map = OccupancyMap(5.0, 0.05);
  ep.start_base = {0, 0, 0};
  Simulator probe(robot, ep);
  const kin::Pose ee = probe.ee_world_pose(probe.initial_state());
  ep.trajectory.waypoints = {ee};
  auto result = run_episode(robot, ep, [](const SimState&, const ControlContext&) {
    return ControlCommand{};
  });
  CHECK(result.success);
  CHECK(result.steps <= 1);
}

TEST_CASE("invalid joint state reports a joint-limit failure") {
  auto robot = test_helpers::load_asset_robot("fmm_franka.robot");
  TaskSamplerConfig cfg;
  TaskEpisode ep = sample_episode(TaskId::RandomGoal, cfg, 7);
  ep.map = OccupancyMap(5.0, 0.05);
  Simulator sim(robot, ep);
  SimState state = sim.initial_state();
  state.q[0] = 2.0;  // torso above its 0.5 m stroke
  auto failure = sim.step(state, ControlCommand{}, kin::Pose{}, 0.02);
  REQUIRE(failure.has_value());
  CHECK(*failure == FailureKind::joint_limit);
}

TEST_CASE("loosening thresholds never converts a success into a failure") {
  // The success predicate is monotone in the thresholds: for a policy whose
  // commands do not depend on them, the trace is identical and a success
  // under tight thresholds stays a success under loose ones.
  auto robot = test_helpers::load_asset_robot("fmm_franka.robot");
  TaskSamplerConfig cfg;
  auto policy = [](const SimState& s, const ControlContext& c) {
    ControlCommand cmd;
    const Eigen::Vector2d to_target =
        c.desired.position.head<2>() - s.base.head<2>();
    cmd.base_twist.head<2>() =
        Eigen::Rotation2Dd(-s.base.z()).toRotationMatrix() * (0.8 * to_target);
    cmd.torso_velocity = 0.5 * (c.desired.position.z() - c.ee_world.position.z());
    const double residual = (c.desired.position - c.ee_world.position).norm();
    cmd.ee_speed = c.nominal_speed * std::max(0.0, 1.0 - 16.0 * residual);
    return cmd;
  };
  int successes = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    TaskEpisode tight = sample_episode(TaskId::RandomGoal, cfg, seed);
    TaskEpisode loose = tight;
    loose.max_trans_err *= 2.0;
    loose.max_rot_err *= 2.0;
    EpisodeResult rt = run_episode(robot, tight, policy);
    EpisodeResult rl = run_episode(robot, loose, policy);
    if (rt.success) {
      CHECK(rl.success);
      ++successes;
    }
  }
  CHECK(successes > 0);  // the property was actually exercised
}

TEST_CASE("episode runs are deterministic") {
  auto robot = test_helpers::load_asset_robot("fmm_franka.robot");
  TaskSamplerConfig cfg;
  TaskEpisode ep = sample_episode(TaskId::Drawer, cfg, 11);
  auto policy = [](const SimState& s, const ControlContext& c) {
    ControlCommand cmd;
    cmd.base_twist = {0.3 * (c.desired.position.x() - s.base.x()),
                      0.3 * (c.desired.position.y() - s.base.y()), 0.1};
    cmd.torso_velocity = 0.05;
    cmd.ee_speed = 0.1;
    return cmd;
  };
  EpisodeResult a = run_episode(robot, ep, policy);
  EpisodeResult b = run_episode(robot, ep, policy);
  CHECK(a.success == b.success);
  CHECK(a.failure == b.failure);
  CHECK(a.steps == b.steps);
  CHECK(a.mean_trans_err == b.mean_trans_err);
}

}  // TEST_SUITE
