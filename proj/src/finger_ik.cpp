#include "handkin/finger_ik.hpp"

#include <cmath>

#include "handkin/errors.hpp"

namespace handkin {

namespace {

constexpr double kReachTol = 1e-9;
constexpr double kBranchRounding = 1e-12;

bool in_limits(double v, const JointLimits& lim) {
  return v >= lim.lower - kBranchRounding && v <= lim.upper + kBranchRounding;
}

AnalyticIk unreachable(std::string why) {
  AnalyticIk out;
  out.failure = std::move(why);
  return out;
}

// angle of a rotation that should be a pure rotation about +y
double y_rotation_angle(const Mat3& m) {
  return std::atan2(m(0, 2) - m(2, 0), m(0, 0) + m(2, 2));
}

}  // namespace

std::optional<std::pair<double, double>> two_link_planar_ik(double l1, double l2, double a,
                                                            double b, double tol) {
  const double d = std::hypot(a, b);
  if (d > l1 + l2 + tol || d < std::abs(l1 - l2) - tol) {
    return std::nullopt;
  }
  double theta2;
  if (std::abs(d - (l1 + l2)) <= tol) {
    theta2 = 0.0;  // tangency: the two circle intersections coincide
  } else {
    const double c = std::clamp((d * d - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), -1.0, 1.0);
    theta2 = std::acos(c);  // the mirrored intersection is -theta2, discarded
  }
  if (theta2 < 0.0 && theta2 >= -kBranchRounding) {
    theta2 = 0.0;
  }
  const double theta1 =
      std::atan2(b, a) - std::atan2(l2 * std::sin(theta2), l1 + l2 * std::cos(theta2));
  return std::make_pair(theta1, theta2);
}

PlanarFold fold_out_of_plane(const Vec3& v) {
  PlanarFold fold;
  const double r = std::hypot(v.x(), v.y());
  fold.planar_x = r;
  if (r > 1e-12) {
    fold.out_of_plane = std::atan2(v.y(), v.x());
    if (std::abs(fold.out_of_plane) > EIGEN_PI / 2.0) {
      fold.out_of_plane -= std::copysign(EIGEN_PI, fold.out_of_plane);
      fold.planar_x = -r;
    }
  }
  return fold;
}

AnalyticIk analytic_finger_ik(const FingerDims& dims, const Transform& tip_pose_in_palm) {
  if (dims.proximal_length <= 0.0 || dims.middle_length <= 0.0 || dims.distal_length <= 0.0) {
    throw ValidationError("finger dims: segment lengths must be positive");
  }
  const double lp = dims.proximal_length;
  const double lm = dims.middle_length;

  // DIP frame pose (after the dip rotation) in the MCP base frame
  const Transform full_dip_to_tip =
      compose(Transform::from_translation(Vec3(dims.distal_length, 0.0, 0.0)), dims.dip_to_tip);
  const Transform dip_in_palm = compose(tip_pose_in_palm, invert(full_dip_to_tip));
  const Transform local = compose(invert(dims.palm_to_mcp), dip_in_palm);
  const Vec3 v = local.translation;

  const double d = v.norm();
  if (d > lp + lm + kReachTol) {
    return unreachable("DIP-to-MCP distance exceeds proximal+middle length");
  }
  if (d < std::abs(lp - lm) - kReachTol) {
    return unreachable("DIP-to-MCP distance below |proximal-middle| length");
  }

  const PlanarFold fold = fold_out_of_plane(v);
  const double abd = fold.out_of_plane;

  // two-link problem in the flexion plane; b measures flexion-positive
  const auto planar = two_link_planar_ik(lp, lm, fold.planar_x, -v.z(), kReachTol);
  if (!planar.has_value()) {
    return unreachable("DIP position outside the proximal/middle circle annulus");
  }
  const auto [mcp, pip] = *planar;

  // remaining rotation about +y is the dip flexion
  const Mat3 residual =
      (Eigen::AngleAxisd(-(mcp + pip), Vec3::UnitY()) * Eigen::AngleAxisd(-abd, Vec3::UnitZ()))
          .toRotationMatrix() *
      local.rotation.toRotationMatrix();
  const double dip = y_rotation_angle(residual);

  FingerAngles angles{abd, mcp, pip, dip};
  if (!in_limits(angles.mcp_abduction, dims.limits.mcp_abduction)) {
    return unreachable("mcp_abduction outside joint limits");
  }
  if (!in_limits(angles.mcp_flexion, dims.limits.mcp_flexion)) {
    return unreachable("mcp_flexion outside joint limits");
  }
  if (!in_limits(angles.pip_flexion, dims.limits.pip)) {
    return unreachable("pip_flexion outside joint limits");
  }
  if (!in_limits(angles.dip_flexion, dims.limits.dip)) {
    return unreachable("dip_flexion outside joint limits");
  }

  AnalyticIk out;
  out.reachable = true;
  out.angles = angles;
  return out;
}

}  // namespace handkin
