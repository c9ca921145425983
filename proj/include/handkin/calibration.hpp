#pragma once

#include <map>
#include <string>
#include <vector>

#include "handkin/model.hpp"
#include "handkin/transform.hpp"

namespace handkin {

/// One broadcast sample: raw integer counts keyed by channel name
/// ("index_B", ...). Channel names equal the glove model's joint names.
struct SensorFrame {
  double timestamp = 0.0;  // seconds
  std::map<std::string, long> channels;
};

struct CalibrationAnchor {
  long raw = 0;
  double angle = 0.0;  // radians
};

/// Anchors sorted strictly increasing in raw, angles monotone
/// (non-decreasing or non-increasing), at least 2 per channel.
struct ChannelCalibration {
  std::vector<CalibrationAnchor> anchors;
};

struct SensorCalibration {
  std::map<std::string, ChannelCalibration> channels;
};

/// Throws ValidationError naming the channel on unsorted/duplicate raw
/// values, non-monotone angles, or fewer than 2 anchors.
void validate_calibration(const SensorCalibration& calib);

/// Piecewise-linear interpolation between the bracketing anchors; raw values
/// outside the anchor range clamp to the end anchors' angles.
double calibrated_angle(const ChannelCalibration& channel, double raw);

/// Maps every channel of the frame through its calibration.
/// Throws DataError on a channel without calibration.
JointStateMap apply_calibration(const SensorFrame& frame, const SensorCalibration& calib);

/// Inverse map angle -> continuous raw count, used by the simulation path.
/// Requires strictly monotone anchor angles; angles outside the anchor range
/// clamp to the end anchors' raw counts.
double invert_channel(const ChannelCalibration& channel, double angle);

/// Pose of the glove base frame expressed in the hand palm frame.
struct Alignment {
  Transform glove_to_hand;
};

/// Rigid registration from one shared calibration posture: both tips are at
/// the same physical point, so glove_to_hand = hand_tip * invert(glove_tip).
Alignment align_spaces(const Transform& glove_tip_world, const Transform& hand_tip_world);

/// Linear 16-bit calibration spanning each revolute joint's limit range;
/// the synthetic stand-in for the mold-based calibration procedure.
SensorCalibration default_calibration(const KinematicModel& glove);

/// Calibration file: {"<channel>": [{"raw": int, "angle_rad": num}, ...], ...}
SensorCalibration parse_calibration(const std::string& text);
std::string serialize_calibration(const SensorCalibration& calib);

/// Alignment file: single transform record {"xyz": [...], "quat": {...}}.
Alignment parse_alignment(const std::string& text);
std::string serialize_alignment(const Alignment& alignment);

}  // namespace handkin
