#include "handkin/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "handkin/errors.hpp"
#include "handkin/finger_ik.hpp"
#include "handkin/json_util.hpp"
#include "handkin/kinematics.hpp"
#include "handkin/rng.hpp"

namespace handkin {

namespace {

constexpr double kTol = 1e-9;

// angle of a rotation that should be a pure rotation about +y
double y_rotation_angle(const Mat3& m) {
  return std::atan2(m(0, 2) - m(2, 0), m(0, 0) + m(2, 2));
}

std::string finger_of_tip(const std::string& tip) { return tip.substr(0, tip.size() - 3); }

bool is_identity(const Transform& t) {
  return t.translation.norm() < kTol && rotation_distance(t.rotation, Quat::Identity()) < kTol;
}

bool is_pure_x_translation(const Transform& t, double* length) {
  if (rotation_distance(t.rotation, Quat::Identity()) >= kTol) {
    return false;
  }
  if (std::abs(t.translation.y()) >= kTol || std::abs(t.translation.z()) >= kTol) {
    return false;
  }
  *length = t.translation.x();
  return *length > 0.0;
}

struct GloveChain {
  Transform palm_to_r;
  Transform tip_offset;
  double rod1 = 0.0;
  double rod2 = 0.0;
  const JointSpec* joints[5] = {};  // R, S, B, F, T
};

// The simulation path needs the canonical linkage layout: per-finger axes
// R=x, S=z, B=F=T=y, S/B coincident with R, rods translating along +x. Any
// glove placement is still expressible through palm_to_r.
GloveChain extract_glove_chain(const KinematicModel& glove, const std::string& finger) {
  const std::string tip = finger + "tip";
  const std::vector<JointSpec> joints = chain(glove, glove.root_link, tip);
  const std::string where = "glove finger '" + finger + "'";
  if (joints.size() != 6 || joints[5].kind != JointKind::fixed) {
    throw DataError(where + ": expected the R,S,B,F,T + fixed-tip chain layout");
  }
  for (int i = 0; i < 5; ++i) {
    if (joints[static_cast<std::size_t>(i)].kind != JointKind::revolute) {
      throw DataError(where + ": expected five revolute joints before the tip");
    }
  }
  GloveChain c;
  c.palm_to_r = joints[0].origin;
  c.tip_offset = joints[5].origin;
  for (int i = 0; i < 5; ++i) {
    c.joints[i] = &glove.joint(joints[static_cast<std::size_t>(i)].name);
  }
  const bool axes_ok = (joints[0].axis - Vec3::UnitX()).norm() < kTol &&
                       (joints[1].axis - Vec3::UnitZ()).norm() < kTol &&
                       (joints[2].axis - Vec3::UnitY()).norm() < kTol &&
                       (joints[3].axis - Vec3::UnitY()).norm() < kTol &&
                       (joints[4].axis - Vec3::UnitY()).norm() < kTol;
  if (!axes_ok || !is_identity(joints[1].origin) || !is_identity(joints[2].origin) ||
      !is_pure_x_translation(joints[3].origin, &c.rod1) ||
      !is_pure_x_translation(joints[4].origin, &c.rod2)) {
    throw DataError(where + ": simulation requires the canonical linkage axes (R=x, S=z, B=F=T=y)");
  }
  return c;
}

double shift_into_limits(double angle, const JointLimits& lim) {
  const double two_pi = 2.0 * EIGEN_PI;
  if (angle < lim.lower - kTol && angle + two_pi <= lim.upper + kTol) {
    return angle + two_pi;
  }
  if (angle > lim.upper + kTol && angle - two_pi >= lim.lower - kTol) {
    return angle - two_pi;
  }
  return angle;
}

// Fingers of `model` whose chain joints are fully covered by the given names;
// partially covered fingers are an error, uncovered ones are skipped.
std::vector<std::string> covered_fingers(const KinematicModel& model,
                                         const std::map<std::string, double>& values,
                                         const std::string& what) {
  std::vector<std::string> fingers;
  for (const std::string& tip : model.end_effectors) {
    const std::vector<std::string> names = chain_joint_names(model, tip);
    std::size_t present = 0;
    std::string missing;
    for (const std::string& n : names) {
      if (values.count(n) > 0) {
        ++present;
      } else if (missing.empty()) {
        missing = n;
      }
    }
    if (present == names.size()) {
      fingers.push_back(finger_of_tip(tip));
    } else if (present > 0) {
      throw DataError(what + " covers finger '" + finger_of_tip(tip) +
                      "' only partially (missing '" + missing + "')");
    }
  }
  return fingers;
}

long quantize(double raw, int adc_bits, long lo, long hi) {
  const double levels = static_cast<double>((1L << adc_bits) - 1);
  const double span = static_cast<double>(hi - lo);
  double t = (raw - static_cast<double>(lo)) / span;
  t = std::clamp(t, 0.0, 1.0);
  const double k = std::round(t * levels);
  return std::lround(static_cast<double>(lo) + k * span / levels);
}

}  // namespace

void validate_noise(const NoiseConfig& noise) {
  if (noise.adc_bits.has_value() && (*noise.adc_bits < 1 || *noise.adc_bits > 16)) {
    throw ValidationError("noise config: adc_bits must be in [1, 16]");
  }
  if (noise.sensor_noise_sd < 0.0) {
    throw ValidationError("noise config: sensor_noise_sd must be >= 0");
  }
  if (std::abs(noise.slip.rotation.norm() - 1.0) > 1e-6) {
    throw ValidationError("noise config: slip rotation must be a unit quaternion");
  }
}

IkConfig pipeline_ik_defaults() { return IkConfig{}; }

namespace {

double weighted_residual(const IkResult& r, double ori_weight) {
  return std::sqrt(r.position_residual * r.position_residual +
                   ori_weight * ori_weight * r.orientation_residual * r.orientation_residual);
}

// A cold zero seed occasionally lands a deeply curled target in the wrong
// basin. On non-convergence the solve is retried from fixed fractions of the
// limit range; the best result wins. Deterministic, and only reached when
// the warm-start contract could not do its job.
IkResult solve_with_fallbacks(const KinematicModel& hand, const std::string& tip,
                              const Transform& target, const JointStateMap& seed,
                              const IkConfig& cfg) {
  IkResult best = solve_ik(hand, tip, target, seed, cfg);
  if (best.converged) {
    return best;
  }
  int total_iterations = best.iterations_used;
  for (double fraction : {0.5, 0.85}) {
    JointStateMap retry_seed;
    for (const auto& [name, value] : seed) {
      const JointSpec& j = hand.joint(name);
      retry_seed[name] = j.limits.lower + fraction * (j.limits.upper - j.limits.lower);
    }
    IkResult retry = solve_ik(hand, tip, target, retry_seed, cfg);
    total_iterations += retry.iterations_used;
    if (retry.converged ||
        weighted_residual(retry, cfg.orientation_weight) <
            weighted_residual(best, cfg.orientation_weight)) {
      best = std::move(retry);
    }
    if (best.converged) {
      break;
    }
  }
  best.iterations_used = total_iterations;
  return best;
}

}  // namespace

EstimateResult estimate_frame(const SensorFrame& frame, const SensorCalibration& calib,
                              const KinematicModel& glove, const Alignment& alignment,
                              const KinematicModel& hand, const IkConfig& cfg,
                              PipelineState& state) {
  const JointStateMap glove_q = apply_calibration(frame, calib);

  EstimateResult out;
  for (const std::string& finger : covered_fingers(glove, glove_q, "sensor frame")) {
    const std::string tip = finger + "tip";
    if (!hand.has_link(tip)) {
      throw DataError("hand model has no chain for finger '" + finger + "'");
    }
    const Transform glove_tip = forward_kinematics(glove, glove_q, tip);
    const Transform target = compose(alignment.glove_to_hand, glove_tip);

    JointStateMap seed;
    for (const std::string& name : chain_joint_names(hand, tip)) {
      auto it = state.seed.find(name);
      seed[name] = it == state.seed.end() ? 0.0 : it->second;
    }
    const IkResult ik = solve_with_fallbacks(hand, tip, target, seed, cfg);

    for (const auto& [name, value] : ik.joints) {
      out.joints[name] = value;
      state.seed[name] = value;
    }
    out.diagnostics[finger] = FingerDiagnostics{ik.converged, ik.position_residual,
                                                ik.orientation_residual, ik.iterations_used};
  }
  state.last_diagnostics = out.diagnostics;
  return out;
}

JointStateMap solve_glove_joints(const KinematicModel& glove, const std::string& finger,
                                 const Transform& tip_in_glove) {
  const GloveChain c = extract_glove_chain(glove, finger);

  // pose of the T frame (after its rotation) in the linkage base frame
  const Transform w = compose(invert(c.palm_to_r), compose(tip_in_glove, invert(c.tip_offset)));
  const Vec3 v = w.translation;

  const PlanarFold fold = fold_out_of_plane(v);
  const auto planar = two_link_planar_ik(c.rod1, c.rod2, fold.planar_x, -v.z(), kTol);
  if (!planar.has_value()) {
    std::ostringstream msg;
    msg << "finger '" << finger << "': tip unreachable by the glove chain (T-joint distance "
        << v.norm() << " m outside the rod annulus [" << std::abs(c.rod1 - c.rod2) << ", "
        << c.rod1 + c.rod2 << "] m)";
    throw DataError(msg.str());
  }
  const auto [q_b, q_f] = *planar;
  const double q_s = fold.out_of_plane;

  const Mat3 residual = (Eigen::AngleAxisd(-(q_b + q_f), Vec3::UnitY()) *
                         Eigen::AngleAxisd(-q_s, Vec3::UnitZ()))
                            .toRotationMatrix() *
                        w.rotation.toRotationMatrix();
  const double q_t = shift_into_limits(y_rotation_angle(residual), c.joints[4]->limits);

  const double values[5] = {0.0, q_s, q_b, q_f, q_t};
  JointStateMap q;
  for (int i = 0; i < 5; ++i) {
    const JointSpec& spec = *c.joints[i];
    if (values[i] < spec.limits.lower - kTol || values[i] > spec.limits.upper + kTol) {
      std::ostringstream msg;
      msg << "finger '" << finger << "': solved angle " << values[i] << " rad for joint '"
          << spec.name << "' violates its limits [" << spec.limits.lower << ", "
          << spec.limits.upper << "]";
      throw DataError(msg.str());
    }
    q[spec.name] = values[i];
  }
  return q;
}

SensorFrame simulate_glove(const JointStateMap& hand_q, const KinematicModel& hand,
                           const KinematicModel& glove, const Alignment& alignment,
                           const SensorCalibration& calib, const NoiseConfig& noise,
                           double timestamp) {
  validate_noise(noise);
  Rng rng(noise.rng_seed);

  const Transform effective = compose(noise.slip, alignment.glove_to_hand);
  const Transform hand_to_glove = invert(effective);

  SensorFrame frame;
  frame.timestamp = timestamp;
  for (const std::string& tip : glove.end_effectors) {
    const std::string finger = finger_of_tip(tip);
    if (!hand.has_link(tip)) {
      continue;
    }
    const std::vector<std::string> hand_names = chain_joint_names(hand, tip);
    std::size_t present = 0;
    for (const std::string& n : hand_names) {
      present += hand_q.count(n);
    }
    if (present == 0) {
      continue;
    }
    if (present < hand_names.size()) {
      throw DataError("hand posture covers finger '" + finger + "' only partially");
    }
    for (const std::string& n : hand_names) {
      const JointSpec& spec = hand.joint(n);
      const double v = hand_q.at(n);
      if (v < spec.limits.lower - kTol || v > spec.limits.upper + kTol) {
        throw DataError("hand posture violates limits of joint '" + n + "'");
      }
    }

    const Transform tip_in_glove = compose(hand_to_glove, forward_kinematics(hand, hand_q, tip));
    const JointStateMap glove_q = solve_glove_joints(glove, finger, tip_in_glove);

    for (const std::string& name : chain_joint_names(glove, tip)) {
      auto cal_it = calib.channels.find(name);
      if (cal_it == calib.channels.end()) {
        throw DataError("no calibration for channel '" + name + "'");
      }
      double angle = glove_q.at(name);
      auto off_it = noise.calibration_offset.find(name);
      if (off_it != noise.calibration_offset.end()) {
        angle += off_it->second;
      }
      // draw unconditionally so streams stay aligned across noise levels
      angle += noise.sensor_noise_sd * rng.normal();

      const double raw = invert_channel(cal_it->second, angle);
      frame.channels[name] =
          noise.adc_bits.has_value()
              ? quantize(raw, *noise.adc_bits, cal_it->second.anchors.front().raw,
                         cal_it->second.anchors.back().raw)
              : std::lround(raw);
    }
  }
  return frame;
}

std::vector<StreamOutput> process_stream(const std::vector<SensorFrame>& frames,
                                         const SensorCalibration& calib,
                                         const KinematicModel& glove,
                                         const Alignment& alignment,
                                         const KinematicModel& hand, const IkConfig& cfg) {
  std::vector<StreamOutput> outputs;
  outputs.reserve(frames.size());
  PipelineState state;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (i > 0) {
      if (frames[i].timestamp < frames[i - 1].timestamp) {
        throw DataError("frame " + std::to_string(i) + ": timestamps must be non-decreasing");
      }
      auto same_keys = [](const SensorFrame& a, const SensorFrame& b) {
        if (a.channels.size() != b.channels.size()) {
          return false;
        }
        auto it = b.channels.begin();
        for (const auto& [k, v] : a.channels) {
          if (k != it->first) {
            return false;
          }
          ++it;
        }
        return true;
      };
      if (!same_keys(frames[0], frames[i])) {
        throw DataError("frame " + std::to_string(i) + ": channel set changed within the stream");
      }
    }
    EstimateResult res = estimate_frame(frames[i], calib, glove, alignment, hand, cfg, state);
    outputs.push_back(StreamOutput{frames[i].timestamp, std::move(res.joints),
                                   std::move(res.diagnostics)});
  }
  return outputs;
}

namespace {

const char* kStreamHeader = "{\"format\":\"handkin/v1\"}";

void check_header(const std::string& line, std::size_t line_no) {
  Json j = Json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("format") ||
      j.at("format") != "handkin/v1") {
    throw DataError("line " + std::to_string(line_no) +
                    ": expected stream header {\"format\":\"handkin/v1\"}");
  }
}

}  // namespace

std::vector<SensorFrame> read_sensor_stream(const std::string& text) {
  std::vector<SensorFrame> frames;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    if (!header_seen) {
      check_header(line, line_no);
      header_seen = true;
      continue;
    }
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw DataError("line " + std::to_string(line_no) + ": malformed frame record");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() != "t" && it.key() != "channels" && it.key() != "trial") {
        throw DataError("line " + std::to_string(line_no) + ": unknown field '" + it.key() + "'");
      }
    }
    if (!j.contains("t") || !j.at("t").is_number()) {
      throw DataError("line " + std::to_string(line_no) + ": missing numeric 't'");
    }
    if (!j.contains("channels") || !j.at("channels").is_object()) {
      throw DataError("line " + std::to_string(line_no) + ": missing 'channels' object");
    }
    SensorFrame frame;
    frame.timestamp = j.at("t").get<double>();
    for (const auto& [name, value] : j.at("channels").items()) {
      if (!value.is_number_integer()) {
        throw DataError("line " + std::to_string(line_no) + ": channel '" + name +
                        "' must be an integer raw count");
      }
      frame.channels[name] = value.get<long>();
    }
    frames.push_back(std::move(frame));
  }
  if (!header_seen && line_no > 0) {
    throw DataError("line 1: expected stream header {\"format\":\"handkin/v1\"}");
  }
  return frames;
}

std::string write_sensor_stream(const std::vector<SensorFrame>& frames) {
  std::ostringstream out;
  out << kStreamHeader << "\n";
  for (const SensorFrame& f : frames) {
    Json j = Json::object();
    j["t"] = f.timestamp;
    Json channels = Json::object();
    for (const auto& [name, raw] : f.channels) {
      channels[name] = raw;
    }
    j["channels"] = channels;
    out << j.dump() << "\n";
  }
  return out.str();
}

std::string write_estimate_stream(const std::vector<StreamOutput>& outputs) {
  std::ostringstream out;
  out << kStreamHeader << "\n";
  for (const StreamOutput& o : outputs) {
    Json j = Json::object();
    j["t"] = o.timestamp;
    Json joints = Json::object();
    for (const auto& [name, value] : o.joints) {
      joints[name] = value;
    }
    j["joints"] = joints;
    Json diags = Json::object();
    for (const auto& [finger, d] : o.diagnostics) {
      diags[finger] = Json{{"converged", d.converged},
                           {"pos_residual", d.position_residual},
                           {"iters", d.iterations}};
    }
    j["diagnostics"] = diags;
    out << j.dump() << "\n";
  }
  return out.str();
}

IkConfig parse_ik_config(const std::string& text) {
  Json doc = parse_json(text, "ik config");
  require_object(doc, "ik config");
  reject_unknown_fields(doc,
                        {"max_iterations", "position_tolerance", "orientation_tolerance",
                         "damping_lambda", "max_step", "orientation_weight"},
                        "ik config");
  IkConfig cfg = pipeline_ik_defaults();
  if (doc.contains("max_iterations")) {
    cfg.max_iterations = static_cast<int>(get_number(doc, "max_iterations", "ik config"));
  }
  if (doc.contains("position_tolerance")) {
    cfg.position_tolerance = get_number(doc, "position_tolerance", "ik config");
  }
  if (doc.contains("orientation_tolerance")) {
    cfg.orientation_tolerance = get_number(doc, "orientation_tolerance", "ik config");
  }
  if (doc.contains("damping_lambda")) {
    cfg.damping_lambda = get_number(doc, "damping_lambda", "ik config");
  }
  if (doc.contains("max_step")) {
    cfg.max_step = get_number(doc, "max_step", "ik config");
  }
  if (doc.contains("orientation_weight")) {
    cfg.orientation_weight = get_number(doc, "orientation_weight", "ik config");
  }
  return cfg;
}

}  // namespace handkin
