#include "handkin/model_io.hpp"

#include "handkin/errors.hpp"
#include "handkin/json_util.hpp"

namespace handkin {

namespace {

JointSpec joint_from_json(const Json& j, std::size_t index) {
  const std::string where = "joints[" + std::to_string(index) + "]";
  require_object(j, where);
  reject_unknown_fields(j, {"name", "kind", "parent", "child", "origin", "axis", "limits"},
                        where);
  JointSpec out;
  out.name = get_string(j, "name", where);
  const std::string kind = get_string(j, "kind", where);
  if (kind == "revolute") {
    out.kind = JointKind::revolute;
  } else if (kind == "fixed") {
    out.kind = JointKind::fixed;
  } else {
    throw ParseError("joint '" + out.name + "': unknown kind '" + kind + "'");
  }
  out.parent_link = get_string(j, "parent", where);
  out.child_link = get_string(j, "child", where);
  if (j.contains("origin")) {
    out.origin = pose_from_json(j.at("origin"), "joint '" + out.name + "' origin");
  }
  if (out.kind == JointKind::revolute) {
    out.axis = get_vec3(j, "axis", "joint '" + out.name + "'");
    if (!j.contains("limits")) {
      throw ParseError("joint '" + out.name + "': revolute joint needs limits");
    }
    const Json& lim = j.at("limits");
    require_object(lim, "joint '" + out.name + "' limits");
    reject_unknown_fields(lim, {"lower", "upper"}, "joint '" + out.name + "' limits");
    out.limits.lower = get_number(lim, "lower", "joint '" + out.name + "' limits");
    out.limits.upper = get_number(lim, "upper", "joint '" + out.name + "' limits");
  } else {
    if (j.contains("axis")) {
      throw ParseError("joint '" + out.name + "': fixed joint must not have an axis");
    }
    if (j.contains("limits")) {
      throw ParseError("joint '" + out.name + "': fixed joint must not have limits");
    }
  }
  return out;
}

}  // namespace

KinematicModel load_model(const std::string& text) {
  Json doc = parse_json(text, "model document");
  require_object(doc, "model document");
  reject_unknown_fields(doc, {"name", "root_link", "joints", "end_effectors"},
                        "model document");
  KinematicModel model;
  model.name = get_string(doc, "name", "model document");
  model.root_link = get_string(doc, "root_link", "model document");
  if (!doc.contains("joints") || !doc.at("joints").is_array()) {
    throw ParseError("model document: missing 'joints' array");
  }
  std::size_t i = 0;
  for (const Json& j : doc.at("joints")) {
    model.joints.push_back(joint_from_json(j, i++));
  }
  if (doc.contains("end_effectors")) {
    if (!doc.at("end_effectors").is_array()) {
      throw ParseError("model document: 'end_effectors' must be an array");
    }
    for (const Json& e : doc.at("end_effectors")) {
      if (!e.is_string()) {
        throw ParseError("model document: end effector names must be strings");
      }
      model.end_effectors.push_back(e.get<std::string>());
    }
  }
  validate_model(model);
  return model;
}

std::string serialize_model(const KinematicModel& model) {
  Json doc = Json::object();
  doc["name"] = model.name;
  doc["root_link"] = model.root_link;
  Json joints = Json::array();
  for (const JointSpec& j : model.joints) {
    Json jj = Json::object();
    jj["name"] = j.name;
    jj["kind"] = j.kind == JointKind::revolute ? "revolute" : "fixed";
    jj["parent"] = j.parent_link;
    jj["child"] = j.child_link;
    jj["origin"] = pose_to_json(j.origin);
    if (j.kind == JointKind::revolute) {
      jj["axis"] = vec3_to_json(j.axis);
      jj["limits"] = {{"lower", j.limits.lower}, {"upper", j.limits.upper}};
    }
    joints.push_back(jj);
  }
  doc["joints"] = joints;
  doc["end_effectors"] = model.end_effectors;
  return doc.dump(2) + "\n";
}

}  // namespace handkin
