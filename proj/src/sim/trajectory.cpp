#include "codesign/sim/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "codesign/common/errors.hpp"

namespace codesign::sim {

double EETrajectory::length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i)
    total += (waypoints[i].position - waypoints[i - 1].position).norm();
  return total;
}

kin::Pose EETrajectory::pose_at(double s) const {
  if (waypoints.empty()) return {};
  if (waypoints.size() == 1 || s <= 0.0) return waypoints.front();
  double remaining = s;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const double seg = (waypoints[i].position - waypoints[i - 1].position).norm();
    if (remaining <= seg || i + 1 == waypoints.size()) {
      if (seg < 1e-12) return waypoints[i];
      const double t = std::clamp(remaining / seg, 0.0, 1.0);
      kin::Pose p;
      p.position = waypoints[i - 1].position + t * (waypoints[i].position - waypoints[i - 1].position);
      p.orientation = waypoints[i - 1].orientation.slerp(t, waypoints[i].orientation);
      return p;
    }
    remaining -= seg;
  }
  return waypoints.back();
}

EETrajectory articulated_trajectory(TrajKind kind, const kin::Pose& object_pose,
                                    const ArticulatedParams& params) {
  if (params.pull_length <= 0 || params.radius <= 0 || params.opening_angle <= 0 ||
      params.waypoint_count < 2)
    throw BadParams("articulated trajectory parameters must be positive");

  EETrajectory traj;
  traj.kind = kind;
  traj.speed = params.speed;
  const Eigen::Isometry3d T = object_pose.to_isometry();

  if (kind == TrajKind::drawer) {
    // Straight pull along the outward normal; orientation is constant.
    for (int i = 0; i < params.waypoint_count; ++i) {
      const double t = static_cast<double>(i) / (params.waypoint_count - 1);
      kin::Pose p;
      p.position = T * Eigen::Vector3d(t * params.pull_length, 0, 0);
      p.orientation = object_pose.orientation;
      traj.waypoints.push_back(p);
    }
    return traj;
  }
  if (kind == TrajKind::door || kind == TrajKind::cabinet || kind == TrajKind::arc) {
    // Hinge on the left (+y) or right (-y) of the handle in the object frame;
    // the leaf swings outward about the vertical hinge axis. The grasp
    // orientation stays constant: a cylindrical handle leaves the wrist yaw
    // unconstrained while the hand rides the arc.
    const double side = params.side == HingeSide::left ? 1.0 : -1.0;
    const Eigen::Vector3d hinge_local(0, side * params.radius, 0);
    for (int i = 0; i < params.waypoint_count; ++i) {
      const double t = static_cast<double>(i) / (params.waypoint_count - 1);
      const double angle = side * t * params.opening_angle;
      const Eigen::AngleAxisd swing(angle, Eigen::Vector3d::UnitZ());
      kin::Pose p;
      const Eigen::Vector3d handle_local = hinge_local + swing * (-hinge_local);
      p.position = T * handle_local;
      p.orientation = object_pose.orientation;
      traj.waypoints.push_back(p);
    }
    return traj;
  }
  throw BadParams("articulated trajectory supports drawer/door/cabinet kinds");
}

namespace {

struct AStarResult {
  std::vector<Eigen::Vector2i> cells;
  double cost = 0.0;
};

std::optional<AStarResult> astar(const OccupancyMap& map, const Eigen::Vector2i& start,
                                 const Eigen::Vector2i& goal,
                                 const std::vector<std::uint8_t>& blocked) {
  const int w = map.width(), h = map.height();
  auto idx = [&](int x, int y) { return static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x); };
  auto is_blocked = [&](int x, int y) {
    return x < 0 || y < 0 || x >= w || y >= h || blocked[idx(x, y)] != 0;
  };
  if (is_blocked(start.x(), start.y()) || is_blocked(goal.x(), goal.y())) return std::nullopt;

  const double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> g(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), kInf);
  std::vector<int> parent(g.size(), -1);
  auto heuristic = [&](int x, int y) {
    return std::hypot(static_cast<double>(x - goal.x()), static_cast<double>(y - goal.y()));
  };

  // Priority: (f, h, y, x) lexicographic for deterministic tie-breaking.
  struct Node {
    double f, h;
    int x, y;
    bool operator>(const Node& o) const {
      if (f != o.f) return f > o.f;
      if (h != o.h) return h > o.h;
      if (y != o.y) return y > o.y;
      return x > o.x;
    }
  };
  std::priority_queue<Node, std::vector<Node>, std::greater<Node>> open;
  g[idx(start.x(), start.y())] = 0.0;
  open.push({heuristic(start.x(), start.y()), heuristic(start.x(), start.y()), start.x(), start.y()});

  static const int dx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static const int dy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  const double diag = std::sqrt(2.0);

  while (!open.empty()) {
    const Node node = open.top();
    open.pop();
    if (node.x == goal.x() && node.y == goal.y()) break;
    const double g_here = g[idx(node.x, node.y)];
    if (node.f - node.h > g_here + 1e-12) continue;  // stale entry
    for (int k = 0; k < 8; ++k) {
      const int nx = node.x + dx[k], ny = node.y + dy[k];
      if (is_blocked(nx, ny)) continue;
      // No corner cutting: diagonal moves need both cardinals free.
      if (k >= 4 && (is_blocked(node.x + dx[k], node.y) || is_blocked(node.x, node.y + dy[k])))
        continue;
      const double step = k < 4 ? 1.0 : diag;
      const double g_new = g_here + step;
      if (g_new < g[idx(nx, ny)] - 1e-12) {
        g[idx(nx, ny)] = g_new;
        parent[idx(nx, ny)] = static_cast<int>(idx(node.x, node.y));
        open.push({g_new + heuristic(nx, ny), heuristic(nx, ny), nx, ny});
      }
    }
  }

  if (g[idx(goal.x(), goal.y())] == kInf) return std::nullopt;
  AStarResult result;
  result.cost = g[idx(goal.x(), goal.y())] * map.cell_size();
  int cur = static_cast<int>(idx(goal.x(), goal.y()));
  while (cur >= 0) {
    result.cells.emplace_back(cur % w, cur / w);
    cur = parent[static_cast<std::size_t>(cur)];
  }
  std::reverse(result.cells.begin(), result.cells.end());
  return result;
}

std::vector<std::uint8_t> inflate(const OccupancyMap& map, double radius) {
  const int w = map.width(), h = map.height();
  std::vector<std::uint8_t> blocked(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
  const int r = static_cast<int>(std::ceil(radius / map.cell_size()));
  const double r2 = radius * radius;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!map.cell_occupied(x, y)) continue;
      for (int oy = -r; oy <= r; ++oy) {
        for (int ox = -r; ox <= r; ++ox) {
          const int nx = x + ox, ny = y + oy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const double d2 = (ox * ox + oy * oy) * map.cell_size() * map.cell_size();
          if (d2 <= r2)
            blocked[static_cast<std::size_t>(ny) * static_cast<std::size_t>(w) +
                    static_cast<std::size_t>(nx)] = 1;
        }
      }
    }
  }
  return blocked;
}

}  // namespace

std::optional<EETrajectory> plan_ee_path(const OccupancyMap& map, const kin::Pose& start,
                                         const kin::Pose& goal, const PlannerParams& params) {
  int sx, sy, gx, gy;
  map.world_to_cell(start.position.x(), start.position.y(), sx, sy);
  map.world_to_cell(goal.position.x(), goal.position.y(), gx, gy);
  const auto blocked = inflate(map, params.inflation_radius);
  const auto result = astar(map, {sx, sy}, {gx, gy}, blocked);
  if (!result) return std::nullopt;

  EETrajectory traj;
  traj.kind = TrajKind::planner;
  const std::size_t n = result->cells.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 1.0;
    kin::Pose p;
    const Eigen::Vector2d c = map.cell_center(result->cells[i].x(), result->cells[i].y());
    p.position = {c.x(), c.y(), start.position.z() + t * (goal.position.z() - start.position.z())};
    p.orientation = start.orientation.slerp(t, goal.orientation);
    traj.waypoints.push_back(p);
  }
  // Pin the endpoints to the requested poses.
  traj.waypoints.front().position = start.position;
  traj.waypoints.back().position = goal.position;
  traj.waypoints.back().orientation = goal.orientation;
  return traj;
}

std::optional<double> plan_path_cost(const OccupancyMap& map, const Eigen::Vector2d& start,
                                     const Eigen::Vector2d& goal, const PlannerParams& params) {
  int sx, sy, gx, gy;
  map.world_to_cell(start.x(), start.y(), sx, sy);
  map.world_to_cell(goal.x(), goal.y(), gx, gy);
  const auto blocked = inflate(map, params.inflation_radius);
  const auto result = astar(map, {sx, sy}, {gx, gy}, blocked);
  if (!result) return std::nullopt;
  return result->cost;
}

}  // namespace codesign::sim
