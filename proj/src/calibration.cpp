#include "handkin/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "handkin/errors.hpp"
#include "handkin/json_util.hpp"

namespace handkin {

namespace {

void check_channel(const std::string& name, const ChannelCalibration& ch) {
  if (ch.anchors.size() < 2) {
    throw ValidationError("channel '" + name + "': needs at least 2 calibration anchors");
  }
  int direction = 0;
  for (std::size_t i = 1; i < ch.anchors.size(); ++i) {
    if (ch.anchors[i].raw <= ch.anchors[i - 1].raw) {
      throw ValidationError("channel '" + name + "': anchor raw values must be strictly increasing");
    }
    const double step = ch.anchors[i].angle - ch.anchors[i - 1].angle;
    if (step > 0.0) {
      if (direction < 0) {
        throw ValidationError("channel '" + name + "': anchor angles must be monotone");
      }
      direction = 1;
    } else if (step < 0.0) {
      if (direction > 0) {
        throw ValidationError("channel '" + name + "': anchor angles must be monotone");
      }
      direction = -1;
    }
  }
}

}  // namespace

void validate_calibration(const SensorCalibration& calib) {
  for (const auto& [name, ch] : calib.channels) {
    check_channel(name, ch);
  }
}

double calibrated_angle(const ChannelCalibration& channel, double raw) {
  const auto& a = channel.anchors;
  if (a.size() < 2) {
    throw DataError("calibration with fewer than 2 anchors");
  }
  if (raw <= static_cast<double>(a.front().raw)) {
    return a.front().angle;
  }
  if (raw >= static_cast<double>(a.back().raw)) {
    return a.back().angle;
  }
  for (std::size_t i = 1; i < a.size(); ++i) {
    const double lo = static_cast<double>(a[i - 1].raw);
    const double hi = static_cast<double>(a[i].raw);
    if (raw <= hi) {
      const double t = (raw - lo) / (hi - lo);
      return a[i - 1].angle + t * (a[i].angle - a[i - 1].angle);
    }
  }
  return a.back().angle;
}

JointStateMap apply_calibration(const SensorFrame& frame, const SensorCalibration& calib) {
  JointStateMap q;
  for (const auto& [name, raw] : frame.channels) {
    auto it = calib.channels.find(name);
    if (it == calib.channels.end()) {
      throw DataError("no calibration for channel '" + name + "'");
    }
    q[name] = calibrated_angle(it->second, static_cast<double>(raw));
  }
  return q;
}

double invert_channel(const ChannelCalibration& channel, double angle) {
  const auto& a = channel.anchors;
  if (a.size() < 2) {
    throw DataError("calibration with fewer than 2 anchors");
  }
  const bool increasing = a.back().angle >= a.front().angle;
  for (std::size_t i = 1; i < a.size(); ++i) {
    if (a[i].angle == a[i - 1].angle) {
      throw DataError("calibration not invertible: flat anchor segment");
    }
  }
  const double lo_angle = increasing ? a.front().angle : a.back().angle;
  const double hi_angle = increasing ? a.back().angle : a.front().angle;
  if (angle <= lo_angle) {
    return static_cast<double>(increasing ? a.front().raw : a.back().raw);
  }
  if (angle >= hi_angle) {
    return static_cast<double>(increasing ? a.back().raw : a.front().raw);
  }
  for (std::size_t i = 1; i < a.size(); ++i) {
    const double a0 = a[i - 1].angle;
    const double a1 = a[i].angle;
    const bool inside = increasing ? (angle <= a1) : (angle >= a1);
    if (inside) {
      const double t = (angle - a0) / (a1 - a0);
      return static_cast<double>(a[i - 1].raw) +
             t * static_cast<double>(a[i].raw - a[i - 1].raw);
    }
  }
  return static_cast<double>(a.back().raw);
}

Alignment align_spaces(const Transform& glove_tip_world, const Transform& hand_tip_world) {
  return Alignment{compose(hand_tip_world, invert(glove_tip_world))};
}

SensorCalibration default_calibration(const KinematicModel& glove) {
  // high-resolution synthetic scale; coarse ADCs are modeled by the
  // quantization stage of the simulation, not by the calibration span
  constexpr long kFullScale = (1L << 30) - 1;
  SensorCalibration calib;
  for (const JointSpec& j : glove.joints) {
    if (j.kind != JointKind::revolute) {
      continue;
    }
    ChannelCalibration ch;
    ch.anchors.push_back({0, j.limits.lower});
    ch.anchors.push_back({kFullScale, j.limits.upper});
    calib.channels[j.name] = ch;
  }
  return calib;
}

SensorCalibration parse_calibration(const std::string& text) {
  Json doc = parse_json(text, "calibration file");
  require_object(doc, "calibration file");
  SensorCalibration calib;
  for (const auto& [name, anchors] : doc.items()) {
    if (!anchors.is_array()) {
      throw ParseError("channel '" + name + "': anchors must be an array");
    }
    ChannelCalibration ch;
    for (const Json& aj : anchors) {
      require_object(aj, "channel '" + name + "' anchor");
      reject_unknown_fields(aj, {"raw", "angle_rad"}, "channel '" + name + "' anchor");
      CalibrationAnchor anchor;
      anchor.raw = static_cast<long>(get_number(aj, "raw", "channel '" + name + "' anchor"));
      anchor.angle = get_number(aj, "angle_rad", "channel '" + name + "' anchor");
      ch.anchors.push_back(anchor);
    }
    calib.channels[name] = ch;
  }
  validate_calibration(calib);
  return calib;
}

std::string serialize_calibration(const SensorCalibration& calib) {
  Json doc = Json::object();
  for (const auto& [name, ch] : calib.channels) {
    Json anchors = Json::array();
    for (const CalibrationAnchor& a : ch.anchors) {
      anchors.push_back(Json{{"raw", a.raw}, {"angle_rad", a.angle}});
    }
    doc[name] = anchors;
  }
  return doc.dump(2) + "\n";
}

Alignment parse_alignment(const std::string& text) {
  Json doc = parse_json(text, "alignment file");
  return Alignment{transform_from_json(doc, "alignment")};
}

std::string serialize_alignment(const Alignment& alignment) {
  return transform_to_json(alignment.glove_to_hand).dump(2) + "\n";
}

}  // namespace handkin
