#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "handkin/transform.hpp"

namespace handkin {

enum class JointKind { revolute, fixed };

struct JointLimits {
  double lower = 0.0;
  double upper = 0.0;
};

struct JointSpec {
  std::string name;
  JointKind kind = JointKind::fixed;
  std::string parent_link;
  std::string child_link;
  Transform origin;          // pose of the joint frame in the parent-link frame
  Vec3 axis{0.0, 0.0, 1.0};  // revolute only, unit norm
  JointLimits limits;        // revolute only, radians
};

/// Joint name -> angle in radians. Ordered map so iteration is deterministic.
using JointStateMap = std::map<std::string, double>;

/// Named tree of links and joints. Immutable after construction; validate()
/// must pass before the model is handed to any kinematics operation.
struct KinematicModel {
  std::string name;
  std::string root_link;
  std::vector<JointSpec> joints;
  std::vector<std::string> end_effectors;

  /// Index of the joint whose child_link is `link`, if any.
  std::optional<std::size_t> joint_to(const std::string& link) const;

  bool has_link(const std::string& link) const;

  /// Names of all revolute joints, in declaration order.
  std::vector<std::string> revolute_joint_names() const;

  const JointSpec& joint(const std::string& name) const;
};

/// Checks all KinematicModel invariants: a single tree rooted at root_link
/// (no cycles, no orphans, no duplicate names), unit revolute axes, ordered
/// finite limits, and every end effector a "<finger>tip"-named leaf link.
/// Throws ValidationError naming the offending element.
void validate_model(const KinematicModel& model);

/// True if every revolute joint value lies within its limits.
bool within_limits(const KinematicModel& model, const JointStateMap& q);

/// Clamps every known joint value into its limits; unknown names untouched.
JointStateMap clamp_to_limits(const KinematicModel& model, const JointStateMap& q);

}  // namespace handkin
