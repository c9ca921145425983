#include "handkin/kinematics.hpp"

#include <algorithm>

#include "handkin/errors.hpp"

namespace handkin {

namespace {

// Joint indices on the path from_link -> to_link, parent->child order.
std::vector<std::size_t> chain_indices(const KinematicModel& model,
                                       const std::string& from_link,
                                       const std::string& to_link) {
  if (!model.has_link(from_link)) {
    throw DataError("unknown link '" + from_link + "' in model '" + model.name + "'");
  }
  if (!model.has_link(to_link)) {
    throw DataError("unknown link '" + to_link + "' in model '" + model.name + "'");
  }
  std::vector<std::size_t> path;
  std::string cur = to_link;
  while (cur != from_link) {
    auto idx = model.joint_to(cur);
    if (!idx.has_value()) {
      throw DataError("link '" + to_link + "' is not a descendant of '" + from_link + "'");
    }
    path.push_back(*idx);
    cur = model.joints[*idx].parent_link;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

double joint_value(const JointStateMap& q, const JointSpec& j) {
  auto it = q.find(j.name);
  if (it == q.end()) {
    throw DataError("missing joint value for '" + j.name + "'");
  }
  return it->second;
}

Transform joint_transform(const JointSpec& j, const JointStateMap& q) {
  if (j.kind == JointKind::fixed) {
    return j.origin;
  }
  return compose(j.origin, Transform::from_axis_angle(j.axis, joint_value(q, j)));
}

}  // namespace

std::vector<JointSpec> chain(const KinematicModel& model, const std::string& from_link,
                             const std::string& to_link) {
  std::vector<JointSpec> joints;
  for (std::size_t idx : chain_indices(model, from_link, to_link)) {
    joints.push_back(model.joints[idx]);
  }
  return joints;
}

std::vector<std::string> chain_joint_names(const KinematicModel& model,
                                           const std::string& target_link) {
  std::vector<std::string> names;
  for (std::size_t idx : chain_indices(model, model.root_link, target_link)) {
    if (model.joints[idx].kind == JointKind::revolute) {
      names.push_back(model.joints[idx].name);
    }
  }
  return names;
}

Transform forward_kinematics(const KinematicModel& model, const JointStateMap& q,
                             const std::string& target_link) {
  Transform pose = Transform::identity();
  for (std::size_t idx : chain_indices(model, model.root_link, target_link)) {
    pose = compose(pose, joint_transform(model.joints[idx], q));
  }
  return pose;
}

std::map<std::string, Transform> all_tip_poses(const KinematicModel& model,
                                               const JointStateMap& q) {
  std::map<std::string, Transform> out;
  for (const std::string& ee : model.end_effectors) {
    out[ee] = forward_kinematics(model, q, ee);
  }
  return out;
}

Eigen::MatrixXd geometric_jacobian(const KinematicModel& model, const JointStateMap& q,
                                   const std::string& target_link) {
  const auto path = chain_indices(model, model.root_link, target_link);

  // world pose of each joint frame (after origin, before joint rotation),
  // collected in one forward pass
  std::vector<Vec3> axes_world;
  std::vector<Vec3> origins_world;
  Transform pose = Transform::identity();
  for (std::size_t idx : path) {
    const JointSpec& j = model.joints[idx];
    Transform at_joint = compose(pose, j.origin);
    if (j.kind == JointKind::revolute) {
      axes_world.push_back(at_joint.rotation * j.axis);
      origins_world.push_back(at_joint.translation);
      pose = compose(at_joint, Transform::from_axis_angle(j.axis, joint_value(q, j)));
    } else {
      pose = at_joint;
    }
  }
  const Vec3 p_tip = pose.translation;

  Eigen::MatrixXd jac(6, static_cast<Eigen::Index>(axes_world.size()));
  for (std::size_t i = 0; i < axes_world.size(); ++i) {
    const Vec3& z = axes_world[i];
    jac.col(static_cast<Eigen::Index>(i)).head<3>() = z.cross(p_tip - origins_world[i]);
    jac.col(static_cast<Eigen::Index>(i)).tail<3>() = z;
  }
  return jac;
}

}  // namespace handkin
