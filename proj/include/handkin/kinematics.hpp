#pragma once

#include <map>
#include <string>
#include <vector>

#include "handkin/model.hpp"
#include "handkin/transform.hpp"

namespace handkin {

/// Joints on the path from_link -> to_link in parent->child order.
/// from_link == to_link yields an empty chain.
/// Throws DataError if a link is unknown or to_link is not a descendant.
std::vector<JointSpec> chain(const KinematicModel& model,
                             const std::string& from_link,
                             const std::string& to_link);

/// Pose of target_link in the root frame. A revolute joint contributes
/// origin * rotation(axis, q), a fixed joint just its origin.
/// Throws DataError on unknown link or missing joint value.
Transform forward_kinematics(const KinematicModel& model, const JointStateMap& q,
                             const std::string& target_link);

/// One pose per declared end effector, keyed by end-effector name.
std::map<std::string, Transform> all_tip_poses(const KinematicModel& model,
                                               const JointStateMap& q);

/// Geometric Jacobian of target_link, 6 x n. Rows 0..2 linear (m/rad),
/// rows 3..5 angular (rad/rad); column i corresponds to the i-th revolute
/// joint on the root->target chain: [z_i x (p_tip - p_i); z_i] in world frame.
Eigen::MatrixXd geometric_jacobian(const KinematicModel& model, const JointStateMap& q,
                                   const std::string& target_link);

/// Names of the revolute joints on the root->target chain, root->tip order
/// (the Jacobian's column labels).
std::vector<std::string> chain_joint_names(const KinematicModel& model,
                                           const std::string& target_link);

}  // namespace handkin
