#include "handkin/models.hpp"

#include <cmath>

#include "handkin/errors.hpp"
#include "handkin/json_util.hpp"
#include "handkin/model_io.hpp"

namespace handkin {

const std::vector<std::string>& finger_names() {
  static const std::vector<std::string> names = {"index", "middle", "ring", "pinky"};
  return names;
}

std::vector<std::string> glove_channel_names(const std::string& finger) {
  return {finger + "_R", finger + "_S", finger + "_B", finger + "_F", finger + "_T"};
}

std::vector<std::string> hand_joint_names(const std::string& finger) {
  return {finger + "_mcp_abduction", finger + "_mcp_flexion", finger + "_pip", finger + "_dip"};
}

namespace {

void check_axis(const Vec3& axis, const std::string& field) {
  if (std::abs(axis.norm() - 1.0) > 1e-9) {
    throw ValidationError(field + ": axis must be unit-norm");
  }
}

void check_positive(double v, const std::string& field) {
  if (!(v > 0.0)) {
    throw ValidationError(field + ": must be > 0");
  }
}

void check_limits(const JointLimits& lim, const std::string& field) {
  if (!std::isfinite(lim.lower) || !std::isfinite(lim.upper)) {
    throw ValidationError(field + ": limits must be finite");
  }
  if (lim.lower > lim.upper) {
    throw ValidationError(field + ": lower limit exceeds upper");
  }
}

JointSpec revolute(std::string name, std::string parent, std::string child, Transform origin,
                   const Vec3& axis, const JointLimits& limits) {
  JointSpec j;
  j.name = std::move(name);
  j.kind = JointKind::revolute;
  j.parent_link = std::move(parent);
  j.child_link = std::move(child);
  j.origin = std::move(origin);
  j.axis = axis;
  j.limits = limits;
  return j;
}

JointSpec fixed(std::string name, std::string parent, std::string child, Transform origin) {
  JointSpec j;
  j.name = std::move(name);
  j.kind = JointKind::fixed;
  j.parent_link = std::move(parent);
  j.child_link = std::move(child);
  j.origin = std::move(origin);
  return j;
}

}  // namespace

KinematicModel build_glove_model(const GloveGeometry& geom) {
  KinematicModel model;
  model.name = geom.name;
  model.root_link = "palm";
  for (const auto& [finger, g] : geom.fingers) {
    const std::string where = "finger '" + finger + "'";
    check_positive(g.rod1_length, where + " rod1_length");
    check_positive(g.rod2_length, where + " rod2_length");
    check_axis(g.r_axis, where + " r_axis");
    check_axis(g.s_axis, where + " s_axis");
    check_axis(g.b_axis, where + " b_axis");
    check_limits(g.limits.r, where + " limits.R");
    check_limits(g.limits.s, where + " limits.S");
    check_limits(g.limits.b, where + " limits.B");
    check_limits(g.limits.f, where + " limits.F");
    check_limits(g.limits.t, where + " limits.T");

    model.joints.push_back(revolute(finger + "_R", "palm", finger + "_r_link", g.palm_to_r,
                                    g.r_axis, g.limits.r));
    model.joints.push_back(revolute(finger + "_S", finger + "_r_link", finger + "_s_link",
                                    Transform::identity(), g.s_axis, g.limits.s));
    model.joints.push_back(revolute(finger + "_B", finger + "_s_link", finger + "_rod1",
                                    Transform::identity(), g.b_axis, g.limits.b));
    model.joints.push_back(revolute(finger + "_F", finger + "_rod1", finger + "_rod2",
                                    Transform::from_translation(Vec3(g.rod1_length, 0.0, 0.0)),
                                    g.b_axis, g.limits.f));
    model.joints.push_back(revolute(finger + "_T", finger + "_rod2", finger + "_t_link",
                                    Transform::from_translation(Vec3(g.rod2_length, 0.0, 0.0)),
                                    g.b_axis, g.limits.t));
    model.joints.push_back(
        fixed(finger + "_tip_fixed", finger + "_t_link", finger + "tip", g.tip_offset));
    model.end_effectors.push_back(finger + "tip");
  }
  validate_model(model);
  return model;
}

KinematicModel build_hand_model(const HandDimensions& dims) {
  KinematicModel model;
  model.name = dims.name;
  model.root_link = "palm";
  for (const auto& [finger, f] : dims.fingers) {
    const std::string where = "finger '" + finger + "'";
    check_positive(f.proximal_length, where + " proximal_length");
    check_positive(f.middle_length, where + " middle_length");
    check_positive(f.distal_length, where + " distal_length");
    check_limits(f.limits.mcp_abduction, where + " limits.mcp_abduction");
    check_limits(f.limits.mcp_flexion, where + " limits.mcp_flexion");
    check_limits(f.limits.pip, where + " limits.pip");
    check_limits(f.limits.dip, where + " limits.dip");
    if (f.limits.pip.lower < 0.0) {
      throw ValidationError(where + " limits.pip: lower limit must be >= 0");
    }
    if (f.limits.dip.lower < 0.0) {
      throw ValidationError(where + " limits.dip: lower limit must be >= 0");
    }

    model.joints.push_back(revolute(finger + "_mcp_abduction", "palm", finger + "_mcp_link",
                                    f.palm_to_mcp, Vec3::UnitZ(), f.limits.mcp_abduction));
    model.joints.push_back(revolute(finger + "_mcp_flexion", finger + "_mcp_link",
                                    finger + "_proximal", Transform::identity(), Vec3::UnitY(),
                                    f.limits.mcp_flexion));
    model.joints.push_back(revolute(finger + "_pip", finger + "_proximal", finger + "_middle",
                                    Transform::from_translation(Vec3(f.proximal_length, 0.0, 0.0)),
                                    Vec3::UnitY(), f.limits.pip));
    model.joints.push_back(revolute(finger + "_dip", finger + "_middle", finger + "_distal",
                                    Transform::from_translation(Vec3(f.middle_length, 0.0, 0.0)),
                                    Vec3::UnitY(), f.limits.dip));
    model.joints.push_back(fixed(
        finger + "_dip_to_tip", finger + "_distal", finger + "tip",
        compose(Transform::from_translation(Vec3(f.distal_length, 0.0, 0.0)), f.dip_to_tip)));
    model.end_effectors.push_back(finger + "tip");
  }
  validate_model(model);
  return model;
}

HandDimensions default_hand_dimensions(double hand_length_m) {
  check_positive(hand_length_m, "hand_length");
  const double s = hand_length_m / 0.172;

  struct Row {
    const char* finger;
    double mcp_x, mcp_y;
    double proximal, middle, distal, pad;
  };
  // reference proportions for a 17.2 cm right hand (wrist to index fingertip)
  static const Row rows[] = {
      {"index", 0.090, 0.022, 0.042, 0.024, 0.013, 0.003},
      {"middle", 0.092, 0.000, 0.046, 0.027, 0.014, 0.003},
      {"ring", 0.089, -0.021, 0.042, 0.025, 0.0135, 0.003},
      {"pinky", 0.083, -0.041, 0.033, 0.019, 0.012, 0.003},
  };

  HandDimensions dims;
  dims.name = "default_hand";
  for (const Row& r : rows) {
    FingerDims f;
    f.proximal_length = r.proximal * s;
    f.middle_length = r.middle * s;
    f.distal_length = r.distal * s;
    f.palm_to_mcp = Transform::from_translation(Vec3(r.mcp_x * s, r.mcp_y * s, 0.0));
    f.dip_to_tip = Transform::from_translation(Vec3(r.pad * s, 0.0, 0.0));
    dims.fingers[r.finger] = f;
  }
  return dims;
}

GloveGeometry default_glove_geometry(const HandDimensions& dims, const Transform& glove_to_hand) {
  GloveGeometry geom;
  geom.name = "default_glove";
  const Transform hand_to_glove = invert(glove_to_hand);
  for (const auto& [finger, f] : dims.fingers) {
    GloveFingerGeometry g;
    g.palm_to_r = compose(hand_to_glove, f.palm_to_mcp);
    g.tip_offset = Transform::from_translation(Vec3(0.015, 0.0, 0.0));
    geom.fingers[finger] = g;
  }
  return geom;
}

namespace {

JointLimits limits_from_json(const Json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown_fields(j, {"lower", "upper"}, where);
  return JointLimits{get_number(j, "lower", where), get_number(j, "upper", where)};
}

Json limits_to_json(const JointLimits& lim) {
  return Json{{"lower", lim.lower}, {"upper", lim.upper}};
}

}  // namespace

GloveGeometry parse_glove_geometry(const std::string& text) {
  Json doc = parse_json(text, "glove geometry");
  require_object(doc, "glove geometry");
  reject_unknown_fields(doc, {"type", "name", "fingers"}, "glove geometry");
  if (get_string(doc, "type", "glove geometry") != "glove_geometry") {
    throw ParseError("glove geometry: type must be 'glove_geometry'");
  }
  GloveGeometry geom;
  if (doc.contains("name")) {
    geom.name = get_string(doc, "name", "glove geometry");
  }
  if (!doc.contains("fingers") || !doc.at("fingers").is_object()) {
    throw ParseError("glove geometry: missing 'fingers' object");
  }
  for (const auto& [finger, fj] : doc.at("fingers").items()) {
    const std::string where = "glove finger '" + finger + "'";
    require_object(fj, where);
    reject_unknown_fields(fj,
                          {"palm_to_r", "r_axis", "s_axis", "b_axis", "rod1_length",
                           "rod2_length", "tip_offset", "limits"},
                          where);
    GloveFingerGeometry g;
    g.palm_to_r = pose_from_json(fj.at("palm_to_r"), where + " palm_to_r");
    if (fj.contains("r_axis")) g.r_axis = get_vec3(fj, "r_axis", where);
    if (fj.contains("s_axis")) g.s_axis = get_vec3(fj, "s_axis", where);
    if (fj.contains("b_axis")) g.b_axis = get_vec3(fj, "b_axis", where);
    g.rod1_length = get_number(fj, "rod1_length", where);
    g.rod2_length = get_number(fj, "rod2_length", where);
    if (fj.contains("tip_offset")) {
      g.tip_offset = pose_from_json(fj.at("tip_offset"), where + " tip_offset");
    }
    if (fj.contains("limits")) {
      const Json& lj = fj.at("limits");
      require_object(lj, where + " limits");
      reject_unknown_fields(lj, {"R", "S", "B", "F", "T"}, where + " limits");
      if (lj.contains("R")) g.limits.r = limits_from_json(lj.at("R"), where + " limits.R");
      if (lj.contains("S")) g.limits.s = limits_from_json(lj.at("S"), where + " limits.S");
      if (lj.contains("B")) g.limits.b = limits_from_json(lj.at("B"), where + " limits.B");
      if (lj.contains("F")) g.limits.f = limits_from_json(lj.at("F"), where + " limits.F");
      if (lj.contains("T")) g.limits.t = limits_from_json(lj.at("T"), where + " limits.T");
    }
    geom.fingers[finger] = g;
  }
  return geom;
}

HandDimensions parse_hand_dimensions(const std::string& text) {
  Json doc = parse_json(text, "hand dimensions");
  require_object(doc, "hand dimensions");
  reject_unknown_fields(doc, {"type", "name", "fingers"}, "hand dimensions");
  if (get_string(doc, "type", "hand dimensions") != "hand_dimensions") {
    throw ParseError("hand dimensions: type must be 'hand_dimensions'");
  }
  HandDimensions dims;
  if (doc.contains("name")) {
    dims.name = get_string(doc, "name", "hand dimensions");
  }
  if (!doc.contains("fingers") || !doc.at("fingers").is_object()) {
    throw ParseError("hand dimensions: missing 'fingers' object");
  }
  for (const auto& [finger, fj] : doc.at("fingers").items()) {
    const std::string where = "hand finger '" + finger + "'";
    require_object(fj, where);
    reject_unknown_fields(fj,
                          {"proximal_length", "middle_length", "distal_length", "palm_to_mcp",
                           "dip_to_tip", "limits"},
                          where);
    FingerDims f;
    f.proximal_length = get_number(fj, "proximal_length", where);
    f.middle_length = get_number(fj, "middle_length", where);
    f.distal_length = get_number(fj, "distal_length", where);
    f.palm_to_mcp = pose_from_json(fj.at("palm_to_mcp"), where + " palm_to_mcp");
    if (fj.contains("dip_to_tip")) {
      f.dip_to_tip = pose_from_json(fj.at("dip_to_tip"), where + " dip_to_tip");
    }
    if (fj.contains("limits")) {
      const Json& lj = fj.at("limits");
      require_object(lj, where + " limits");
      reject_unknown_fields(lj, {"mcp_abduction", "mcp_flexion", "pip", "dip"}, where + " limits");
      if (lj.contains("mcp_abduction")) {
        f.limits.mcp_abduction = limits_from_json(lj.at("mcp_abduction"), where + " limits.mcp_abduction");
      }
      if (lj.contains("mcp_flexion")) {
        f.limits.mcp_flexion = limits_from_json(lj.at("mcp_flexion"), where + " limits.mcp_flexion");
      }
      if (lj.contains("pip")) {
        f.limits.pip = limits_from_json(lj.at("pip"), where + " limits.pip");
      }
      if (lj.contains("dip")) {
        f.limits.dip = limits_from_json(lj.at("dip"), where + " limits.dip");
      }
    }
    dims.fingers[finger] = f;
  }
  return dims;
}

std::string serialize_glove_geometry(const GloveGeometry& geom) {
  Json doc = Json::object();
  doc["type"] = "glove_geometry";
  doc["name"] = geom.name;
  Json fingers = Json::object();
  for (const auto& [finger, g] : geom.fingers) {
    Json fj = Json::object();
    fj["palm_to_r"] = pose_to_json(g.palm_to_r);
    fj["r_axis"] = vec3_to_json(g.r_axis);
    fj["s_axis"] = vec3_to_json(g.s_axis);
    fj["b_axis"] = vec3_to_json(g.b_axis);
    fj["rod1_length"] = g.rod1_length;
    fj["rod2_length"] = g.rod2_length;
    fj["tip_offset"] = pose_to_json(g.tip_offset);
    fj["limits"] = Json{{"R", limits_to_json(g.limits.r)},
                        {"S", limits_to_json(g.limits.s)},
                        {"B", limits_to_json(g.limits.b)},
                        {"F", limits_to_json(g.limits.f)},
                        {"T", limits_to_json(g.limits.t)}};
    fingers[finger] = fj;
  }
  doc["fingers"] = fingers;
  return doc.dump(2) + "\n";
}

std::string serialize_hand_dimensions(const HandDimensions& dims) {
  Json doc = Json::object();
  doc["type"] = "hand_dimensions";
  doc["name"] = dims.name;
  Json fingers = Json::object();
  for (const auto& [finger, f] : dims.fingers) {
    Json fj = Json::object();
    fj["proximal_length"] = f.proximal_length;
    fj["middle_length"] = f.middle_length;
    fj["distal_length"] = f.distal_length;
    fj["palm_to_mcp"] = pose_to_json(f.palm_to_mcp);
    fj["dip_to_tip"] = pose_to_json(f.dip_to_tip);
    fj["limits"] = Json{{"mcp_abduction", limits_to_json(f.limits.mcp_abduction)},
                        {"mcp_flexion", limits_to_json(f.limits.mcp_flexion)},
                        {"pip", limits_to_json(f.limits.pip)},
                        {"dip", limits_to_json(f.limits.dip)}};
    fingers[finger] = fj;
  }
  doc["fingers"] = fingers;
  return doc.dump(2) + "\n";
}

KinematicModel load_any_model(const std::string& text) {
  Json doc = parse_json(text, "model document");
  if (doc.is_object() && doc.contains("type") && doc.at("type").is_string()) {
    const std::string type = doc.at("type").get<std::string>();
    if (type == "glove_geometry") {
      return build_glove_model(parse_glove_geometry(text));
    }
    if (type == "hand_dimensions") {
      return build_hand_model(parse_hand_dimensions(text));
    }
    throw ParseError("unknown config type '" + type + "'");
  }
  return load_model(text);
}

}  // namespace handkin
