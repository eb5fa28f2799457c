#pragma once

#include <array>
#include <string>

#include <Eigen/Core>

namespace codesign::model {

/// One point of the six-dimensional arm-mounting design space:
/// arm pitch/yaw at the mount, end-effector pitch, tower translation
/// (forward/lateral) and tower yaw. Angles in radians, lengths in meters.
struct DesignParams {
  double arm_pitch_alpha = 0.0;  // [0, pi/2]   upright .. straight forward
  double arm_yaw_beta = 0.0;     // [-pi/2, pi/2], applied after alpha
  double ee_pitch_rho = 0.0;     // [0, pi/2]   forward .. downward facing
  double forward_x = 0.0;        // [-0.05, 0.15] m, tower along base x
  double lateral_y = 0.0;        // [-0.20, 0.20] m, tower along base y
  double tower_yaw_phi = 0.0;    // [-pi/2, pi/2]

  /// Validating constructor path; throws OutOfBounds on any violated range.
  static DesignParams make(double alpha, double beta, double rho, double x, double y,
                           double phi);
  static DesignParams tabletop() { return {}; }  // the default mounting

  std::array<double, 6> as_array() const {
    return {arm_pitch_alpha, arm_yaw_beta, ee_pitch_rho, forward_x, lateral_y, tower_yaw_phi};
  }
  bool operator==(const DesignParams&) const = default;
};

/// Per-dimension closed bounds of the design space.
class DesignSpace {
 public:
  static constexpr int kDim = 6;

  /// The standard mounting ranges.
  DesignSpace();
  DesignSpace(const Eigen::Matrix<double, kDim, 1>& lower,
              const Eigen::Matrix<double, kDim, 1>& upper);

  const Eigen::Matrix<double, kDim, 1>& lower() const { return lower_; }
  const Eigen::Matrix<double, kDim, 1>& upper() const { return upper_; }
  bool contains(const DesignParams& omega) const;

 private:
  Eigen::Matrix<double, kDim, 1> lower_;
  Eigen::Matrix<double, kDim, 1> upper_;
};

/// Affine map of a design point into the unit cube used by the optimizer.
/// decode_unit(encode_unit(omega)) == omega exactly for in-range values.
Eigen::Matrix<double, 6, 1> encode_unit(const DesignParams& omega, const DesignSpace& space);
DesignParams decode_unit(const Eigen::Matrix<double, 6, 1>& u, const DesignSpace& space);

/// Names of the six dimensions, in encoding order.
const std::array<std::string, 6>& design_dim_names();

}  // namespace codesign::model
