#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "handkin/errors.hpp"
#include "handkin/transform.hpp"

namespace handkin {

using Json = nlohmann::json;

inline Json parse_json(const std::string& text, const std::string& what) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw ParseError(what + ": malformed JSON");
  }
  return j;
}

inline void require_object(const Json& j, const std::string& where) {
  if (!j.is_object()) {
    throw ParseError(where + ": expected an object");
  }
}

/// Rejects fields outside `known` (schema strictness).
inline void reject_unknown_fields(const Json& j, const std::vector<std::string>& known,
                                  const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const std::string& k : known) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw ParseError(where + ": unknown field '" + it.key() + "'");
    }
  }
}

inline double get_number(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ParseError(where + ": missing or non-numeric field '" + key + "'");
  }
  return j.at(key).get<double>();
}

inline std::string get_string(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ParseError(where + ": missing or non-string field '" + key + "'");
  }
  return j.at(key).get<std::string>();
}

inline Vec3 get_vec3(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != 3) {
    throw ParseError(where + ": field '" + key + "' must be an array of 3 numbers");
  }
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j.at(key)[i].is_number()) {
      throw ParseError(where + ": field '" + key + "' must be an array of 3 numbers");
    }
    v[i] = j.at(key)[i].get<double>();
  }
  return v;
}

inline Json vec3_to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

/// Pose record with xyz + one of rpy / axis_angle. Absent rotation = identity.
inline Transform pose_from_json(const Json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown_fields(j, {"xyz", "rpy", "axis_angle"}, where);
  Vec3 xyz = Vec3::Zero();
  if (j.contains("xyz")) {
    xyz = get_vec3(j, "xyz", where);
  }
  if (j.contains("rpy") && j.contains("axis_angle")) {
    throw ParseError(where + ": give either 'rpy' or 'axis_angle', not both");
  }
  if (j.contains("rpy")) {
    return Transform::from_rpy(xyz, get_vec3(j, "rpy", where));
  }
  if (j.contains("axis_angle")) {
    const Json& aa = j.at("axis_angle");
    require_object(aa, where + ".axis_angle");
    reject_unknown_fields(aa, {"axis", "angle"}, where + ".axis_angle");
    Vec3 axis = get_vec3(aa, "axis", where + ".axis_angle");
    if (axis.norm() < 1e-12) {
      throw ParseError(where + ".axis_angle: zero axis");
    }
    double angle = get_number(aa, "angle", where + ".axis_angle");
    Transform t = Transform::from_axis_angle(axis, angle);
    t.translation = xyz;
    return t;
  }
  return Transform::from_translation(xyz);
}

inline Json pose_to_json(const Transform& t) {
  Json j = Json::object();
  j["xyz"] = vec3_to_json(t.translation);
  j["rpy"] = vec3_to_json(to_rpy(t.rotation));
  return j;
}

/// Transform record with explicit quaternion: {"xyz":[...], "quat":{"w","x","y","z"}}.
inline Transform transform_from_json(const Json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown_fields(j, {"xyz", "quat"}, where);
  Transform t;
  if (j.contains("xyz")) {
    t.translation = get_vec3(j, "xyz", where);
  }
  if (j.contains("quat")) {
    const Json& q = j.at("quat");
    require_object(q, where + ".quat");
    reject_unknown_fields(q, {"w", "x", "y", "z"}, where + ".quat");
    t.rotation = Quat(get_number(q, "w", where + ".quat"), get_number(q, "x", where + ".quat"),
                      get_number(q, "y", where + ".quat"), get_number(q, "z", where + ".quat"));
    if (std::abs(t.rotation.norm() - 1.0) > 1e-6) {
      throw ParseError(where + ".quat: not a unit quaternion");
    }
    t.rotation.normalize();
  }
  return t;
}

inline Json transform_to_json(const Transform& t) {
  Json j = Json::object();
  j["xyz"] = vec3_to_json(t.translation);
  j["quat"] = {{"w", t.rotation.w()},
               {"x", t.rotation.x()},
               {"y", t.rotation.y()},
               {"z", t.rotation.z()}};
  return j;
}

}  // namespace handkin
