#include "codesign/manip/manipulability.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/SVD>

#include "codesign/common/errors.hpp"
#include "codesign/common/parallel.hpp"
#include "codesign/common/rng.hpp"

namespace codesign::manip {

double manipulability_measure(const Eigen::MatrixXd& J) {
  const Eigen::Index rows = J.rows();
  if (J.cols() < rows) return 0.0;  // det(JJ^T) = 0 below full row rank
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  const auto& sigma = svd.singularValues();
  double m = 1.0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (sigma[i] < 1e-12) return 0.0;
    m *= sigma[i];
  }
  return m;
}

WorkspaceGrid::WorkspaceGrid() {
  // Approach axis (end-effector z) along +x, -x, +y, -y, +z, -z of the base
  // frame, each with a canonical roll.
  auto ry = [](double a) { return Eigen::Quaterniond(Eigen::AngleAxisd(a, Eigen::Vector3d::UnitY())); };
  auto rx = [](double a) { return Eigen::Quaterniond(Eigen::AngleAxisd(a, Eigen::Vector3d::UnitX())); };
  orientations[0] = ry(M_PI / 2.0);     // +x
  orientations[1] = ry(-M_PI / 2.0);    // -x
  orientations[2] = rx(-M_PI / 2.0);    // +y
  orientations[3] = rx(M_PI / 2.0);     // -y
  orientations[4] = Eigen::Quaterniond::Identity();  // +z
  orientations[5] = rx(M_PI);           // -z
}

std::vector<double> WorkspaceGrid::axis_points(int axis) const {
  const double lo = corner_min[axis], hi = corner_max[axis];
  const int n = static_cast<int>(std::floor((hi - lo) / spacing + 1e-9)) + 1;
  std::vector<double> pts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pts[static_cast<std::size_t>(i)] = lo + i * spacing;
  // Keep the upper corner inclusive when spacing divides the extent exactly.
  if (!pts.empty() && std::abs(pts.back() - hi) < 1e-9) pts.back() = hi;
  return pts;
}

std::vector<Eigen::Vector3d> WorkspaceGrid::points() const {
  std::vector<Eigen::Vector3d> out;
  auto xs = axis_points(0), ys = axis_points(1), zs = axis_points(2);
  out.reserve(xs.size() * ys.size() * zs.size());
  for (double x : xs)
    for (double y : ys)
      for (double z : zs) out.emplace_back(x, y, z);
  return out;
}

void ManipField::finalize() {
  mu = 0.0;
  reachable = 0;
  for (double v : values) {
    mu += v;
    if (v > 0.0) ++reachable;
  }
  if (!values.empty()) mu /= static_cast<double>(values.size());
}

ManipField global_manipulability(const model::RobotDescription& robot, const WorkspaceGrid& grid,
                                 std::uint64_t rng_seed, const GlobalManipOptions& options) {
  kin::Kinematics kin(robot);
  const auto points = grid.points();
  const std::size_t n_orient = grid.orientations.size();

  ManipField field;
  field.grid = grid;
  field.values.assign(points.size() * n_orient, 0.0);

  kin::JacobianOptions whole_body;
  whole_body.include_base = true;

  parallel_for(field.values.size(), [&](std::size_t pose_index) {
    const std::size_t pt = pose_index / n_orient;
    const std::size_t ori = pose_index % n_orient;
    kin::Pose target;
    target.position = points[pt];
    target.orientation = grid.orientations[ori];
    const kin::JointConfig seed = kin.sample_config(seed_mix(rng_seed, pose_index));
    const auto solution = kin.ik_dls(target, seed, options.ik);
    if (solution) {
      const Eigen::MatrixXd J = kin.jacobian(*solution, robot.ee_link(), whole_body);
      field.values[pose_index] = manipulability_measure(J);
    }
  }, options.workers);

  field.finalize();
  return field;
}

void export_heatmap(const ManipField& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write heatmap file: " + path);
  out << "x,y,z,orientation_index,m\n";
  const auto points = field.grid.points();
  const std::size_t n_orient = field.grid.orientations.size();
  char buf[160];
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    const auto& p = points[i / n_orient];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%zu,%.17g\n", p.x(), p.y(), p.z(),
                  i % n_orient, field.values[i]);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "mu,,,,%.17g\n", field.mu);
  out << buf;
  if (!out) throw IoError("failed writing heatmap file: " + path);
}

ManipField import_heatmap(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open heatmap file: " + path);
  ManipField field;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    if (cell == "mu") {
      for (int skip = 0; skip < 3; ++skip) std::getline(ss, cell, ',');
      std::getline(ss, cell, ',');
      field.mu = std::strtod(cell.c_str(), nullptr);
      continue;
    }
    std::string rest;
    double m = 0.0;
    std::vector<std::string> cells{cell};
    while (std::getline(ss, rest, ',')) cells.push_back(rest);
    if (cells.size() != 5) throw IoError("malformed heatmap row: " + line);
    m = std::strtod(cells[4].c_str(), nullptr);
    field.values.push_back(m);
  }
  field.reachable = 0;
  for (double v : field.values)
    if (v > 0.0) ++field.reachable;
  return field;
}

}  // namespace codesign::manip
