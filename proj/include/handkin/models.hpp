#pragma once

#include <map>
#include <string>
#include <vector>

#include "handkin/finger_ik.hpp"
#include "handkin/model.hpp"

namespace handkin {

/// Canonical finger order used by both models (thumb deliberately absent;
/// the schemas reserve the name so a thumb chain can be added later).
const std::vector<std::string>& finger_names();

struct GloveJointLimits {
  JointLimits r{-0.6, 0.6};
  JointLimits s{-0.6, 0.6};
  JointLimits b{-1.2, 2.2};
  JointLimits f{-0.2, 3.0};
  JointLimits t{-1.5, 1.5};
};

/// One exoskeleton finger linkage: R (roll), S (split) and B (bend) stacked
/// at the proximal mount, then two rods with sensors F and T, then a fixed
/// offset to the fingertip mount. F and T rotate about the bend axis.
struct GloveFingerGeometry {
  Transform palm_to_r;
  Vec3 r_axis{1.0, 0.0, 0.0};
  Vec3 s_axis{0.0, 0.0, 1.0};
  Vec3 b_axis{0.0, 1.0, 0.0};
  double rod1_length = 0.060;  // B -> F
  double rod2_length = 0.050;  // F -> T
  Transform tip_offset;        // T -> "<finger>tip"
  GloveJointLimits limits;
};

struct GloveGeometry {
  std::string name = "glove";
  std::map<std::string, GloveFingerGeometry> fingers;
};

struct HandDimensions {
  std::string name = "hand";
  std::map<std::string, FingerDims> fingers;
};

/// Expands the glove geometry into a kinematic tree: per finger
/// palm -> R -> S -> B -> rod1 -> F -> rod2 -> T -> tip_offset -> "<finger>tip",
/// joints named "<finger>_R" etc. Throws ValidationError naming the bad field.
KinematicModel build_glove_model(const GloveGeometry& geom);

/// Expands the hand dimensions into the 4-DoF-per-finger kinematic tree:
/// palm -> mcp_abduction -> mcp_flexion (coincident) -> proximal -> pip
///      -> middle -> dip -> distal -> dip_to_tip -> "<finger>tip".
KinematicModel build_hand_model(const HandDimensions& dims);

/// Measurement-style defaults for a right hand, scaled proportionally from
/// the overall wrist-to-index-fingertip length. The segment ratios are
/// engineering defaults, not measured values; override via config files.
HandDimensions default_hand_dimensions(double hand_length_m = 0.172);

/// A glove geometry fitted over the given hand: the per-finger linkage base
/// coincides with the MCP, expressed in the glove base frame placed at
/// glove_to_hand relative to the palm. Rod lengths and tip offset are
/// configuration defaults (not measured values).
GloveGeometry default_glove_geometry(const HandDimensions& dims,
                                     const Transform& glove_to_hand = Transform::identity());

/// Config-file parsing. Both schemas mirror the struct fields; see README.
GloveGeometry parse_glove_geometry(const std::string& text);
HandDimensions parse_hand_dimensions(const std::string& text);
std::string serialize_glove_geometry(const GloveGeometry& geom);
std::string serialize_hand_dimensions(const HandDimensions& dims);

/// Accepts a full model document, a glove geometry config or a hand
/// dimensions config (dispatching on the "type" field) and returns the
/// validated kinematic model.
KinematicModel load_any_model(const std::string& text);

/// Glove sensor channels of one finger, in chain order R,S,B,F,T.
std::vector<std::string> glove_channel_names(const std::string& finger);

/// Hand joint names of one finger chain, root->tip order.
std::vector<std::string> hand_joint_names(const std::string& finger);

}  // namespace handkin
