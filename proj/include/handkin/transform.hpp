#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace handkin {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Rigid pose: unit quaternion + translation in meters.
/// compose(a, b) follows homogeneous-matrix semantics, i.e. a * b maps
/// b-frame coordinates into a's parent frame.
struct Transform {
  Quat rotation{1.0, 0.0, 0.0, 0.0};
  Vec3 translation{0.0, 0.0, 0.0};

  static Transform identity() { return {}; }

  static Transform from_translation(const Vec3& t) {
    return Transform{Quat::Identity(), t};
  }

  static Transform from_rotation(const Quat& q) {
    return Transform{q.normalized(), Vec3::Zero()};
  }

  static Transform from_axis_angle(const Vec3& axis, double angle) {
    return Transform{Quat(Eigen::AngleAxisd(angle, axis.normalized())), Vec3::Zero()};
  }

  /// Fixed-axis roll-pitch-yaw (URDF convention): R = Rz(yaw) Ry(pitch) Rx(roll).
  static Transform from_rpy(const Vec3& xyz, const Vec3& rpy) {
    Quat q = Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) *
             Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
             Eigen::AngleAxisd(rpy.x(), Vec3::UnitX());
    return Transform{q.normalized(), xyz};
  }
};

inline Transform compose(const Transform& a, const Transform& b) {
  Transform out;
  out.rotation = (a.rotation * b.rotation).normalized();
  out.translation = a.translation + a.rotation * b.translation;
  return out;
}

inline Transform invert(const Transform& t) {
  Transform out;
  out.rotation = t.rotation.conjugate();
  out.translation = -(out.rotation * t.translation);
  return out;
}

inline Vec3 apply(const Transform& t, const Vec3& p) {
  return t.rotation * p + t.translation;
}

inline Mat4 to_matrix(const Transform& t) {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = t.rotation.toRotationMatrix();
  m.topRightCorner<3, 1>() = t.translation;
  return m;
}

/// Rotation angle of the relative rotation between a and b, in [0, pi].
/// atan2 form, well conditioned near both 0 and pi.
inline double rotation_distance(const Quat& a, const Quat& b) {
  const Quat rel = a.conjugate() * b;
  return 2.0 * std::atan2(rel.vec().norm(), std::abs(rel.w()));
}

/// Rotation vector (axis * angle) of q, in radians.
inline Vec3 rotation_vector(const Quat& q) {
  Eigen::AngleAxisd aa(q);
  double angle = aa.angle();
  // keep the short way around
  if (angle > EIGEN_PI) {
    angle -= 2.0 * EIGEN_PI;
  }
  return aa.axis() * angle;
}

/// Roll-pitch-yaw angles such that from_rpy(., rpy) reproduces q.
inline Vec3 to_rpy(const Quat& q) {
  Mat3 r = q.toRotationMatrix();
  double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  double roll, yaw;
  if (std::abs(r(2, 0)) < 1.0 - 1e-12) {
    roll = std::atan2(r(2, 1), r(2, 2));
    yaw = std::atan2(r(1, 0), r(0, 0));
  } else {
    // gimbal lock: put the free angle into yaw
    roll = 0.0;
    yaw = std::atan2(-r(0, 1), r(1, 1));
  }
  return Vec3(roll, pitch, yaw);
}

}  // namespace handkin
