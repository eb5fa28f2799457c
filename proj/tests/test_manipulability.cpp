#include <cmath>
#include <cstdio>

#include "doctest.h"

#include "codesign/common/rng.hpp"
#include "codesign/manip/manipulability.hpp"
#include "helpers.hpp"

using namespace codesign;
using namespace codesign::manip;
using test_helpers::make_planar_2r;

TEST_SUITE("manipulability") {

TEST_CASE("identity jacobian has measure one") {
  CHECK(manipulability_measure(Eigen::MatrixXd::Identity(6, 6)) == doctest::Approx(1.0));
}

TEST_CASE("planar 2R measure equals l1*l2*|sin(theta2)|") {
  Rng rng(1234);
  for (int i = 0; i < 1000; ++i) {
    const double l1 = rng.uniform(0.1, 2.0);
    const double l2 = rng.uniform(0.1, 2.0);
    const double t1 = rng.uniform(-M_PI, M_PI);
    const double t2 = rng.uniform(-M_PI, M_PI);
    Eigen::Matrix2d J;
    J << -l1 * std::sin(t1) - l2 * std::sin(t1 + t2), -l2 * std::sin(t1 + t2),
        l1 * std::cos(t1) + l2 * std::cos(t1 + t2), l2 * std::cos(t1 + t2);
    const double expected = l1 * l2 * std::abs(std::sin(t2));
    CHECK(manipulability_measure(J) == doctest::Approx(expected).epsilon(1e-9));
  }
  // Stretched singular configuration returns exactly zero.
  Eigen::Matrix2d J;
  J << 0.0, 0.0, 2.0, 1.0;  // theta1 = theta2 = 0, l1 = l2 = 1
  CHECK(manipulability_measure(J) == 0.0);
}

TEST_CASE("measure scales quadratically with uniform link scaling") {
  const double t2 = 0.9;
  for (double k : {0.5, 2.0, 3.0}) {
    Eigen::Matrix2d J;
    const double l1 = 0.8 * k, l2 = 0.6 * k, t1 = 0.3;
    J << -l1 * std::sin(t1) - l2 * std::sin(t1 + t2), -l2 * std::sin(t1 + t2),
        l1 * std::cos(t1) + l2 * std::cos(t1 + t2), l2 * std::cos(t1 + t2);
    CHECK(manipulability_measure(J) ==
          doctest::Approx(k * k * 0.8 * 0.6 * std::abs(std::sin(t2))).epsilon(1e-9));
  }
}

TEST_CASE("measure is invariant under column permutation") {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd J(3, 5);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 5; ++c) J(r, c) = rng.uniform(-1, 1);
    const double m = manipulability_measure(J);
    // Swap two random columns.
    int a = static_cast<int>(rng.uniform_int(5)), b = static_cast<int>(rng.uniform_int(5));
    Eigen::MatrixXd P = J;
    P.col(a).swap(P.col(b));
    CHECK(manipulability_measure(P) == doctest::Approx(m).epsilon(1e-9));
  }
}

TEST_CASE("wide-but-rank-deficient jacobians return zero") {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(6, 4);  // fewer columns than rows
  J.setRandom();
  CHECK(manipulability_measure(J) == 0.0);
}

TEST_CASE("grid covers inclusive corners and the documented resolution") {
  WorkspaceGrid grid;
  auto xs = grid.axis_points(0);
  auto ys = grid.axis_points(1);
  auto zs = grid.axis_points(2);
  CHECK(xs.size() == 5);
  CHECK(ys.size() == 17);
  CHECK(zs.size() == 17);
  CHECK(xs.front() == doctest::Approx(-0.2));
  CHECK(xs.back() == doctest::Approx(0.2));
  CHECK(zs.front() == doctest::Approx(0.1));
  CHECK(zs.back() == doctest::Approx(1.7));
  CHECK(grid.points().size() == 1445);
  CHECK(grid.pose_count() == 8670);
}

TEST_CASE("unreachable workspace yields mu = 0") {
  auto robot = make_planar_2r(0.05, 0.05);  // reach 0.1, grid starts at z 0.1
  WorkspaceGrid grid;
  grid.corner_min = {1.0, 1.0, 1.0};
  grid.corner_max = {1.2, 1.2, 1.2};
  grid.spacing = 0.1;
  ManipField field = global_manipulability(robot, grid, 5);
  CHECK(field.mu == 0.0);
  CHECK(field.reachable == 0);
}

TEST_CASE("mu is the mean including zeros") {
  ManipField field;
  field.values = {0.5, 0.0};
  field.finalize();
  CHECK(field.mu == doctest::Approx(0.25));
  CHECK(field.reachable == 1);
  // Monotonicity: replacing a zero with a positive value increases mu.
  field.values = {0.5, 0.2};
  field.finalize();
  CHECK(field.mu > 0.25);
}

TEST_CASE("global manipulability is deterministic for a fixed seed") {
  auto robot = test_helpers::load_asset_robot("fmm_franka.robot");
  WorkspaceGrid grid;
  grid.corner_min = {0.3, -0.2, 0.8};
  grid.corner_max = {0.5, 0.2, 1.2};
  grid.spacing = 0.2;
  ManipField a = global_manipulability(robot, grid, 2024);
  ManipField b = global_manipulability(robot, grid, 2024);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
  CHECK(a.mu == b.mu);
  CHECK(a.reachable > 0);  // the near workspace is reachable
}

TEST_CASE("heatmap csv round-trips mu") {
  auto robot = test_helpers::load_asset_robot("fmm_franka.robot");
  WorkspaceGrid grid;
  grid.corner_min = {0.3, -0.1, 0.9};
  grid.corner_max = {0.5, 0.1, 1.1};
  grid.spacing = 0.2;
  ManipField field = global_manipulability(robot, grid, 7);
  const std::string path = "heatmap_test.csv";
  export_heatmap(field, path);
  ManipField loaded = import_heatmap(path);
  REQUIRE(loaded.values.size() == field.values.size());
  double mean = 0;
  for (double v : loaded.values) mean += v;
  mean /= static_cast<double>(loaded.values.size());
  CHECK(std::abs(mean - field.mu) < 1e-9);
  CHECK(std::abs(loaded.mu - field.mu) < 1e-9);
  std::remove(path.c_str());
}

TEST_CASE("empty grid exports a header-only csv with mu 0") {
  ManipField field;
  field.finalize();
  const std::string path = "heatmap_empty.csv";
  export_heatmap(field, path);
  ManipField loaded = import_heatmap(path);
  CHECK(loaded.values.empty());
  CHECK(loaded.mu == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("two-point grid exports 12 data rows") {
  ManipField field;
  field.grid.corner_min = {0, 0, 0.1};
  field.grid.corner_max = {0, 0, 0.2};
  field.grid.spacing = 0.1;
  REQUIRE(field.grid.points().size() == 2);
  field.values.assign(12, 0.1);
  field.finalize();
  const std::string path = "heatmap_rows.csv";
  export_heatmap(field, path);
  ManipField loaded = import_heatmap(path);
  CHECK(loaded.values.size() == 12);
  std::remove(path.c_str());
}

}  // TEST_SUITE
