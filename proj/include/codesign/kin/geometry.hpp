#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace codesign::kin {

/// 6-DoF pose: position plus unit quaternion.
struct Pose {
  Eigen::Vector3d position{0, 0, 0};
  Eigen::Quaterniond orientation{1, 0, 0, 0};

  static Pose from_isometry(const Eigen::Isometry3d& T) {
    Pose p;
    p.position = T.translation();
    p.orientation = Eigen::Quaterniond(T.linear()).normalized();
    return p;
  }
  Eigen::Isometry3d to_isometry() const {
    Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
    T.linear() = orientation.toRotationMatrix();
    T.translation() = position;
    return T;
  }
};

/// Spatial velocity: linear (m/s) and angular (rad/s) components.
struct Twist {
  Eigen::Vector3d linear{0, 0, 0};
  Eigen::Vector3d angular{0, 0, 0};
};

/// End-effector twist induced by joint velocities through a geometric
/// Jacobian (linear rows on top).
inline Twist twist_from_jacobian(const Eigen::MatrixXd& J, const Eigen::VectorXd& qdot) {
  const Eigen::Matrix<double, 6, 1> v = J * qdot;
  Twist t;
  t.linear = v.head<3>();
  t.angular = v.tail<3>();
  return t;
}

/// Rotation-vector (log map) of the relative rotation taking `from` to `to`.
inline Eigen::Vector3d orientation_error(const Eigen::Quaterniond& to,
                                         const Eigen::Quaterniond& from) {
  Eigen::AngleAxisd aa(to * from.conjugate());
  return aa.angle() * aa.axis();
}

/// Positional and angular distance between poses.
inline double position_distance(const Pose& a, const Pose& b) {
  return (a.position - b.position).norm();
}
inline double rotation_distance(const Pose& a, const Pose& b) {
  return std::abs(2.0 * std::acos(std::min(1.0, std::abs(a.orientation.dot(b.orientation)))));
}

inline double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a < -M_PI) a += 2.0 * M_PI;
  return a;
}

}  // namespace codesign::kin
