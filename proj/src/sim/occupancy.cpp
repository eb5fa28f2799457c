#include "codesign/sim/occupancy.hpp"

#include <algorithm>
#include <cmath>

#include "codesign/common/errors.hpp"

namespace codesign::sim {

OccupancyMap::OccupancyMap(double half_extent, double cell_size)
    : OccupancyMap(Eigen::Vector2d(-half_extent, -half_extent),
                   static_cast<int>(std::ceil(2 * half_extent / cell_size)),
                   static_cast<int>(std::ceil(2 * half_extent / cell_size)), cell_size) {}

OccupancyMap::OccupancyMap(const Eigen::Vector2d& origin, int width, int height, double cell_size)
    : origin_(origin), width_(width), height_(height), cell_size_(cell_size) {
  if (cell_size <= 0) throw BadParams("cell size must be positive");
  if (width <= 0 || height <= 0) throw BadParams("map dimensions must be positive");
  cells_.assign(static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_), 0);
}

void OccupancyMap::add_obstacle(const ObstacleRect& rect) {
  obstacles_.push_back(rect);
  rasterize();
}

void OccupancyMap::open_door() {
  obstacles_.erase(std::remove_if(obstacles_.begin(), obstacles_.end(),
                                  [](const ObstacleRect& o) { return o.is_door_leaf; }),
                   obstacles_.end());
  rasterize();
}

void OccupancyMap::rasterize() {
  std::fill(cells_.begin(), cells_.end(), 0);
  for (const auto& o : obstacles_) {
    int ix0, iy0, ix1, iy1;
    world_to_cell(o.min.x(), o.min.y(), ix0, iy0);
    world_to_cell(o.max.x(), o.max.y(), ix1, iy1);
    ix0 = std::max(ix0 - 1, 0);
    iy0 = std::max(iy0 - 1, 0);
    ix1 = std::min(ix1 + 1, width_ - 1);
    iy1 = std::min(iy1 + 1, height_ - 1);
    for (int iy = iy0; iy <= iy1; ++iy) {
      for (int ix = ix0; ix <= ix1; ++ix) {
        const Eigen::Vector2d c = cell_center(ix, iy);
        if (o.contains(c.x(), c.y()))
          cells_[static_cast<std::size_t>(iy) * static_cast<std::size_t>(width_) +
                 static_cast<std::size_t>(ix)] = 1;
      }
    }
  }
}

bool OccupancyMap::in_bounds(double x, double y) const {
  return x >= origin_.x() && y >= origin_.y() && x < origin_.x() + width_ * cell_size_ &&
         y < origin_.y() + height_ * cell_size_;
}

bool OccupancyMap::cell_occupied(int ix, int iy) const {
  if (ix < 0 || iy < 0 || ix >= width_ || iy >= height_) return true;
  return cells_[static_cast<std::size_t>(iy) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(ix)] != 0;
}

bool OccupancyMap::occupied_at(double x, double y) const {
  if (!in_bounds(x, y)) return true;
  int ix, iy;
  world_to_cell(x, y, ix, iy);
  return cell_occupied(ix, iy);
}

Eigen::Vector2d OccupancyMap::cell_center(int ix, int iy) const {
  return origin_ + Eigen::Vector2d((ix + 0.5) * cell_size_, (iy + 0.5) * cell_size_);
}

void OccupancyMap::world_to_cell(double x, double y, int& ix, int& iy) const {
  ix = static_cast<int>(std::floor((x - origin_.x()) / cell_size_));
  iy = static_cast<int>(std::floor((y - origin_.y()) / cell_size_));
}

bool OccupancyMap::footprint_collides(double x, double y, double yaw,
                                      const Eigen::Vector2d& half_extents) const {
  const double c = std::cos(yaw), s = std::sin(yaw);
  const double reach = half_extents.norm();
  // Any corner outside the map is a collision (the base must stay inside).
  for (int sx = -1; sx <= 1; sx += 2) {
    for (int sy = -1; sy <= 1; sy += 2) {
      const double cx = x + c * sx * half_extents.x() - s * sy * half_extents.y();
      const double cy = y + s * sx * half_extents.x() + c * sy * half_extents.y();
      if (!in_bounds(cx, cy)) return true;
    }
  }
  int ix0, iy0, ix1, iy1;
  world_to_cell(x - reach, y - reach, ix0, iy0);
  world_to_cell(x + reach, y + reach, ix1, iy1);
  for (int iy = std::max(iy0, 0); iy <= std::min(iy1, height_ - 1); ++iy) {
    for (int ix = std::max(ix0, 0); ix <= std::min(ix1, width_ - 1); ++ix) {
      if (!cell_occupied(ix, iy)) continue;
      const Eigen::Vector2d p = cell_center(ix, iy);
      const double dx = p.x() - x, dy = p.y() - y;
      const double lx = c * dx + s * dy;    // into footprint frame
      const double ly = -s * dx + c * dy;
      if (std::abs(lx) <= half_extents.x() && std::abs(ly) <= half_extents.y()) return true;
    }
  }
  return false;
}

bool OccupancyMap::disc_collides(double x, double y, double z, double radius) const {
  for (const auto& o : obstacles_) {
    if (!o.blocks_ee || z > o.top) continue;
    const double cx = std::clamp(x, o.min.x(), o.max.x());
    const double cy = std::clamp(y, o.min.y(), o.max.y());
    const double dx = x - cx, dy = y - cy;
    if (dx * dx + dy * dy <= radius * radius) return true;
  }
  return false;
}

std::vector<Eigen::Vector2d> OccupancyMap::occupied_near(double x, double y,
                                                         double radius) const {
  std::vector<Eigen::Vector2d> out;
  int ix0, iy0, ix1, iy1;
  world_to_cell(x - radius, y - radius, ix0, iy0);
  world_to_cell(x + radius, y + radius, ix1, iy1);
  for (int iy = std::max(iy0, 0); iy <= std::min(iy1, height_ - 1); ++iy) {
    for (int ix = std::max(ix0, 0); ix <= std::min(ix1, width_ - 1); ++ix) {
      if (!cell_occupied(ix, iy)) continue;
      const Eigen::Vector2d p = cell_center(ix, iy);
      if ((p - Eigen::Vector2d(x, y)).norm() <= radius) out.push_back(p);
    }
  }
  return out;
}

bool OccupancyMap::operator==(const OccupancyMap& other) const {
  if (width_ != other.width_ || height_ != other.height_ || cell_size_ != other.cell_size_ ||
      origin_ != other.origin_ || cells_ != other.cells_ ||
      obstacles_.size() != other.obstacles_.size())
    return false;
  for (std::size_t i = 0; i < obstacles_.size(); ++i) {
    const auto& a = obstacles_[i];
    const auto& b = other.obstacles_[i];
    if (a.min != b.min || a.max != b.max || a.top != b.top || a.blocks_ee != b.blocks_ee ||
        a.is_door_leaf != b.is_door_leaf)
      return false;
  }
  return true;
}

}  // namespace codesign::sim
