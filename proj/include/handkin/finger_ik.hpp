#pragma once

#include <optional>
#include <string>
#include <utility>

#include "handkin/model.hpp"
#include "handkin/transform.hpp"

namespace handkin {

struct FingerLimits {
  JointLimits mcp_abduction{-0.35, 0.35};
  JointLimits mcp_flexion{-0.1, 1.6};
  JointLimits pip{0.0, 1.9};
  JointLimits dip{0.0, 1.4};
};

/// Per-finger segment data for one 4-DoF chain:
///   palm -> mcp_abduction -> mcp_flexion -> proximal -> pip -> middle
///        -> dip -> distal -> dip_to_tip -> tip.
/// dip_to_tip is the extra fixed offset beyond the distal bone (finger pad);
/// the full DIP-frame-to-tip transform is Tx(distal_length) * dip_to_tip.
struct FingerDims {
  double proximal_length = 0.0;
  double middle_length = 0.0;
  double distal_length = 0.0;
  Transform palm_to_mcp;
  Transform dip_to_tip;
  FingerLimits limits;
};

struct FingerAngles {
  double mcp_abduction = 0.0;
  double mcp_flexion = 0.0;
  double pip_flexion = 0.0;
  double dip_flexion = 0.0;
};

struct AnalyticIk {
  bool reachable = false;
  FingerAngles angles{};  // valid iff reachable
  std::string failure;    // reason iff not reachable
};

/// Closed-form IK for one finger chain given the tip pose in the palm frame.
///
/// The DIP position follows from the tip pose and the DIP-to-tip transform,
/// the MCP position from palm_to_mcp. Abduction is the angle of the DIP
/// position out of the zero-abduction flexion plane, measured at the MCP.
/// The PIP position is the intersection of the circles of radius
/// proximal_length about the MCP and middle_length about the DIP; of the two
/// intersections, the one yielding negative PIP flexion is discarded, which
/// leaves exactly one candidate. DIP flexion comes from the DIP frame
/// orientation. Unreachable when the circles do not intersect (tolerance
/// 1e-9 m) or the unique candidate violates the joint limits.
AnalyticIk analytic_finger_ik(const FingerDims& dims, const Transform& tip_pose_in_palm);

/// Planar two-link IK: joint angles (theta1, theta2) placing the far joint
/// of links l1, l2 at (a, b), with theta2 on the non-negative branch.
/// nullopt outside the annulus [|l1-l2|, l1+l2] (tolerance tol); distances
/// within tol of full extension collapse to theta2 = 0.
std::optional<std::pair<double, double>> two_link_planar_ik(double l1, double l2, double a,
                                                            double b, double tol = 1e-9);

/// Out-of-plane angle (rotation about +z, folded into [-pi/2, pi/2]) of v,
/// and the signed in-plane radius that remains after undoing it:
/// Rz(-angle) * v = (planar_x, 0, v.z).
struct PlanarFold {
  double out_of_plane = 0.0;
  double planar_x = 0.0;
};
PlanarFold fold_out_of_plane(const Vec3& v);

}  // namespace handkin
