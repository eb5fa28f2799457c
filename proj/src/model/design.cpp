#include "codesign/model/design.hpp"

#include <cmath>

#include "codesign/common/errors.hpp"

namespace codesign::model {

namespace {
constexpr double kHalfPi = M_PI / 2.0;
}

DesignSpace::DesignSpace() {
  lower_ << 0.0, -kHalfPi, 0.0, -0.05, -0.20, -kHalfPi;
  upper_ << kHalfPi, kHalfPi, kHalfPi, 0.15, 0.20, kHalfPi;
}

DesignSpace::DesignSpace(const Eigen::Matrix<double, kDim, 1>& lower,
                         const Eigen::Matrix<double, kDim, 1>& upper)
    : lower_(lower), upper_(upper) {
  for (int i = 0; i < kDim; ++i)
    if (!(lower_[i] < upper_[i]))
      throw OutOfBounds("design space dimension " + std::to_string(i) +
                        " has lower >= upper");
}

bool DesignSpace::contains(const DesignParams& omega) const {
  auto v = omega.as_array();
  for (int i = 0; i < kDim; ++i)
    if (v[static_cast<std::size_t>(i)] < lower_[i] || v[static_cast<std::size_t>(i)] > upper_[i])
      return false;
  return true;
}

DesignParams DesignParams::make(double alpha, double beta, double rho, double x, double y,
                                double phi) {
  DesignParams omega{alpha, beta, rho, x, y, phi};
  DesignSpace space;
  if (!space.contains(omega)) {
    auto v = omega.as_array();
    for (int i = 0; i < DesignSpace::kDim; ++i) {
      if (v[static_cast<std::size_t>(i)] < space.lower()[i] ||
          v[static_cast<std::size_t>(i)] > space.upper()[i])
        throw OutOfBounds("design parameter '" + design_dim_names()[static_cast<std::size_t>(i)] +
                          "' = " + std::to_string(v[static_cast<std::size_t>(i)]) +
                          " outside its range");
    }
  }
  return omega;
}

namespace {

/// Per-dimension affine decode with exact endpoints.
double decode_dim(double u, double lo, double hi) {
  if (u == 0.0) return lo;
  if (u == 1.0) return hi;
  return lo + u * (hi - lo);
}

}  // namespace

Eigen::Matrix<double, 6, 1> encode_unit(const DesignParams& omega, const DesignSpace& space) {
  if (!space.contains(omega)) throw OutOfBounds("design point outside the design space");
  auto v = omega.as_array();
  Eigen::Matrix<double, 6, 1> u;
  for (int i = 0; i < DesignSpace::kDim; ++i) {
    const double lo = space.lower()[i], hi = space.upper()[i];
    const double value = v[static_cast<std::size_t>(i)];
    const double u0 = (value - lo) / (hi - lo);
    // Snap to the exact preimage of decode when one exists within 1 ulp,
    // so decode(encode(omega)) round-trips bit-exactly.
    const double candidates[3] = {u0, std::nextafter(u0, 0.0), std::nextafter(u0, 2.0)};
    u[i] = u0;
    for (double c : candidates) {
      if (c >= 0.0 && c <= 1.0 && decode_dim(c, lo, hi) == value) {
        u[i] = c;
        break;
      }
    }
  }
  return u;
}

DesignParams decode_unit(const Eigen::Matrix<double, 6, 1>& u, const DesignSpace& space) {
  std::array<double, 6> v{};
  for (int i = 0; i < DesignSpace::kDim; ++i) {
    if (u[i] < 0.0 || u[i] > 1.0)
      throw OutOfBounds("unit coordinate " + std::to_string(i) + " outside [0,1]");
    v[static_cast<std::size_t>(i)] = decode_dim(u[i], space.lower()[i], space.upper()[i]);
  }
  return DesignParams{v[0], v[1], v[2], v[3], v[4], v[5]};
}

const std::array<std::string, 6>& design_dim_names() {
  static const std::array<std::string, 6> names = {
      "arm_pitch_alpha", "arm_yaw_beta", "ee_pitch_rho", "forward_x", "lateral_y", "tower_yaw_phi"};
  return names;
}

}  // namespace codesign::model
