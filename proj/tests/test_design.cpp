#include <cmath>

#include "doctest.h"

#include "codesign/common/errors.hpp"
#include "codesign/common/rng.hpp"
#include "codesign/model/design.hpp"

using namespace codesign;
using namespace codesign::model;

TEST_SUITE("design") {

TEST_CASE("construction rejects out-of-range values") {
  CHECK_NOTHROW(DesignParams::make(0.3, -0.5, 1.0, 0.1, -0.15, 0.2));
  CHECK_THROWS_AS(DesignParams::make(-0.01, 0, 0, 0, 0, 0), OutOfBounds);
  CHECK_THROWS_AS(DesignParams::make(M_PI / 2 + 0.01, 0, 0, 0, 0, 0), OutOfBounds);
  CHECK_THROWS_AS(DesignParams::make(0, 0, 0, 0.16, 0, 0), OutOfBounds);
  CHECK_THROWS_AS(DesignParams::make(0, 0, 0, 0, -0.21, 0), OutOfBounds);
}

TEST_CASE("encode maps bounds and midpoint") {
  DesignSpace space;
  DesignParams lower = decode_unit(Eigen::Matrix<double, 6, 1>::Zero(), space);
  Eigen::Matrix<double, 6, 1> u = encode_unit(lower, space);
  for (int i = 0; i < 6; ++i) CHECK(u[i] == 0.0);

  DesignParams upper = decode_unit(Eigen::Matrix<double, 6, 1>::Ones(), space);
  u = encode_unit(upper, space);
  for (int i = 0; i < 6; ++i) CHECK(u[i] == 1.0);

  Eigen::Matrix<double, 6, 1> half = Eigen::Matrix<double, 6, 1>::Constant(0.5);
  DesignParams mid = decode_unit(half, space);
  CHECK(mid.forward_x == doctest::Approx(0.05).epsilon(1e-15));  // midpoint of -0.05..0.15
  u = encode_unit(mid, space);
  for (int i = 0; i < 6; ++i) CHECK(u[i] == 0.5);
}

TEST_CASE("decode of out-of-cube coordinates fails") {
  DesignSpace space;
  Eigen::Matrix<double, 6, 1> u = Eigen::Matrix<double, 6, 1>::Constant(0.5);
  u[3] = 1.0001;
  CHECK_THROWS_AS(decode_unit(u, space), OutOfBounds);
}

TEST_CASE("round-trip is exact on 1000 random points") {
  DesignSpace space;
  Rng rng(20240817);
  for (int it = 0; it < 1000; ++it) {
    // Points sampled the way the optimizer produces them: through the
    // affine map from the unit cube.
    std::array<double, 6> v{};
    for (int i = 0; i < 6; ++i)
      v[static_cast<std::size_t>(i)] =
          space.lower()[i] + rng.uniform() * (space.upper()[i] - space.lower()[i]);
    DesignParams omega{v[0], v[1], v[2], v[3], v[4], v[5]};
    DesignParams back = decode_unit(encode_unit(omega, space), space);
    CHECK(back == omega);
  }
}

TEST_CASE("encode rejects points outside the space") {
  DesignSpace space;
  DesignParams omega;
  omega.forward_x = 0.2;
  CHECK_THROWS_AS(encode_unit(omega, space), OutOfBounds);
}

}  // TEST_SUITE
