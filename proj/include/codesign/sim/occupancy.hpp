#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace codesign::sim {

/// Axis-aligned rectangular obstacle. Obstacles are 2-D for the base; the
/// end effector only collides below `top` (walls default to full height)
/// and only when `blocks_ee` is set (furniture the arm reaches over keeps
/// blocking the base).
struct ObstacleRect {
  Eigen::Vector2d min{0, 0};
  Eigen::Vector2d max{0, 0};
  double top = 1e9;        // m, obstacle height for end-effector checks
  bool blocks_ee = true;
  bool is_door_leaf = false;  // removed when the episode's door opens

  bool contains(double x, double y) const {
    return x >= min.x() && x <= max.x() && y >= min.y() && y <= max.y();
  }
};

/// 2-D occupancy grid rasterized from a rectangle list. A cell is occupied
/// iff its center lies inside an obstacle, so raster and rectangle queries
/// agree to within one cell.
class OccupancyMap {
 public:
  OccupancyMap() = default;
  /// Square map of the given half-extent centered on the origin.
  OccupancyMap(double half_extent, double cell_size);
  OccupancyMap(const Eigen::Vector2d& origin, int width, int height, double cell_size);

  void add_obstacle(const ObstacleRect& rect);
  /// Drops door-leaf obstacles and re-rasterizes (the door has been opened).
  void open_door();

  int width() const { return width_; }
  int height() const { return height_; }
  double cell_size() const { return cell_size_; }
  const Eigen::Vector2d& origin() const { return origin_; }
  const std::vector<ObstacleRect>& obstacles() const { return obstacles_; }

  bool in_bounds(double x, double y) const;
  bool cell_occupied(int ix, int iy) const;
  /// World-coordinate occupancy; outside the map counts as occupied.
  bool occupied_at(double x, double y) const;

  Eigen::Vector2d cell_center(int ix, int iy) const;
  void world_to_cell(double x, double y, int& ix, int& iy) const;

  /// Oriented-rectangle footprint collision against the raster. Any part of
  /// the footprint leaving the map counts as a collision.
  bool footprint_collides(double x, double y, double yaw,
                          const Eigen::Vector2d& half_extents) const;
  /// Disc collision (end effector): occupied cells within `radius` whose
  /// obstacle height reaches `z`. The rectangle list provides the height.
  bool disc_collides(double x, double y, double z, double radius) const;

  /// Occupied cell centers within `radius` of (x, y); used for repulsion.
  std::vector<Eigen::Vector2d> occupied_near(double x, double y, double radius) const;

  bool operator==(const OccupancyMap& other) const;

 private:
  void rasterize();

  Eigen::Vector2d origin_{0, 0};  // world position of cell (0,0) corner
  int width_ = 0, height_ = 0;
  double cell_size_ = 0.05;
  std::vector<std::uint8_t> cells_;
  std::vector<ObstacleRect> obstacles_;
};

}  // namespace codesign::sim
