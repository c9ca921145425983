#include "handkin/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "handkin/errors.hpp"

namespace handkin {

std::optional<std::size_t> KinematicModel::joint_to(const std::string& link) const {
  for (std::size_t i = 0; i < joints.size(); ++i) {
    if (joints[i].child_link == link) {
      return i;
    }
  }
  return std::nullopt;
}

bool KinematicModel::has_link(const std::string& link) const {
  if (link == root_link) {
    return true;
  }
  return std::any_of(joints.begin(), joints.end(), [&](const JointSpec& j) {
    return j.child_link == link || j.parent_link == link;
  });
}

std::vector<std::string> KinematicModel::revolute_joint_names() const {
  std::vector<std::string> names;
  for (const JointSpec& j : joints) {
    if (j.kind == JointKind::revolute) {
      names.push_back(j.name);
    }
  }
  return names;
}

const JointSpec& KinematicModel::joint(const std::string& name) const {
  for (const JointSpec& j : joints) {
    if (j.name == name) {
      return j;
    }
  }
  throw DataError("unknown joint '" + name + "' in model '" + this->name + "'");
}

namespace {

bool is_tip_name(const std::string& name) {
  return name.size() > 3 && name.ends_with("tip");
}

}  // namespace

void validate_model(const KinematicModel& model) {
  if (model.root_link.empty()) {
    throw ValidationError("model '" + model.name + "': missing root");
  }

  std::set<std::string> joint_names;
  std::set<std::string> child_links;
  for (const JointSpec& j : model.joints) {
    if (j.name.empty()) {
      throw ValidationError("model '" + model.name + "': joint with empty name");
    }
    if (!joint_names.insert(j.name).second) {
      throw ValidationError("duplicate joint name '" + j.name + "'");
    }
    if (j.parent_link == j.child_link) {
      throw ValidationError("cycle: joint '" + j.name + "' connects link '" +
                            j.parent_link + "' to itself");
    }
    if (!child_links.insert(j.child_link).second) {
      throw ValidationError("duplicate link name '" + j.child_link +
                            "' (two joints share a child)");
    }
    if (j.kind == JointKind::revolute) {
      if (std::abs(j.axis.norm() - 1.0) > 1e-9) {
        throw ValidationError("joint '" + j.name + "': non-unit axis");
      }
      if (!std::isfinite(j.limits.lower) || !std::isfinite(j.limits.upper)) {
        throw ValidationError("joint '" + j.name + "': non-finite limits");
      }
      if (j.limits.lower > j.limits.upper) {
        throw ValidationError("joint '" + j.name + "': inverted limits");
      }
    }
    double n = std::abs(j.origin.rotation.norm() - 1.0);
    if (n > 1e-9) {
      throw ValidationError("joint '" + j.name + "': origin rotation not a unit quaternion");
    }
  }
  if (child_links.count(model.root_link) > 0) {
    throw ValidationError("root link '" + model.root_link + "' is a child of some joint");
  }
  // link names must not collide with the root other than via the check above;
  // a parent that is neither the root nor some child is an orphan subtree
  for (const JointSpec& j : model.joints) {
    if (j.parent_link != model.root_link && child_links.count(j.parent_link) == 0) {
      throw ValidationError("joint '" + j.name + "': parent link '" + j.parent_link +
                            "' is not connected to the tree (orphan)");
    }
  }
  // walk up from every link; failure to reach the root within #joints steps is a cycle
  for (const JointSpec& j : model.joints) {
    std::string cur = j.child_link;
    std::size_t steps = 0;
    while (cur != model.root_link) {
      auto idx = model.joint_to(cur);
      if (!idx.has_value()) {
        throw ValidationError("link '" + cur + "' has no path to the root");
      }
      cur = model.joints[*idx].parent_link;
      if (++steps > model.joints.size()) {
        throw ValidationError("cycle involving link '" + j.child_link + "'");
      }
    }
  }

  std::set<std::string> parents;
  for (const JointSpec& j : model.joints) {
    parents.insert(j.parent_link);
  }
  std::set<std::string> ee_seen;
  for (const std::string& ee : model.end_effectors) {
    if (!is_tip_name(ee)) {
      throw ValidationError("end effector '" + ee + "' does not follow the '<finger>tip' convention");
    }
    if (child_links.count(ee) == 0) {
      throw ValidationError("end effector '" + ee + "' is not a link of the model");
    }
    if (parents.count(ee) > 0) {
      throw ValidationError("end effector '" + ee + "' is not a leaf link");
    }
    if (!ee_seen.insert(ee).second) {
      throw ValidationError("duplicate end effector '" + ee + "'");
    }
  }
}

bool within_limits(const KinematicModel& model, const JointStateMap& q) {
  for (const JointSpec& j : model.joints) {
    if (j.kind != JointKind::revolute) {
      continue;
    }
    auto it = q.find(j.name);
    if (it == q.end()) {
      continue;
    }
    if (it->second < j.limits.lower || it->second > j.limits.upper) {
      return false;
    }
  }
  return true;
}

JointStateMap clamp_to_limits(const KinematicModel& model, const JointStateMap& q) {
  JointStateMap out = q;
  for (const JointSpec& j : model.joints) {
    if (j.kind != JointKind::revolute) {
      continue;
    }
    auto it = out.find(j.name);
    if (it != out.end()) {
      it->second = std::clamp(it->second, j.limits.lower, j.limits.upper);
    }
  }
  return out;
}

}  // namespace handkin
