#include <doctest.h>

#include <cmath>

#include "handkin/errors.hpp"
#include "handkin/kinematics.hpp"
#include "handkin/models.hpp"
#include "handkin/pipeline.hpp"
#include "handkin/rng.hpp"
#include "oracles.hpp"

using namespace handkin;

namespace {

struct Fixture {
  HandDimensions dims;
  KinematicModel hand;
  KinematicModel glove;
  SensorCalibration calib;
  Alignment alignment;

  explicit Fixture(const Transform& glove_to_hand = Transform::identity())
      : dims(default_hand_dimensions()),
        hand(build_hand_model(dims)),
        glove(build_glove_model(default_glove_geometry(dims, glove_to_hand))),
        calib(default_calibration(glove)),
        alignment{glove_to_hand} {}
};

JointStateMap random_hand_posture(Rng& rng, const KinematicModel& hand) {
  JointStateMap q;
  for (const std::string& name : hand.revolute_joint_names()) {
    const JointSpec& j = hand.joint(name);
    q[name] = rng.uniform(j.limits.lower, j.limits.upper);
  }
  return q;
}

double max_joint_error(const JointStateMap& a, const JointStateMap& b) {
  double worst = 0.0;
  for (const auto& [name, value] : a) {
    worst = std::max(worst, std::abs(value - b.at(name)));
  }
  return worst;
}

}  // namespace

TEST_CASE("round trip: simulate then estimate recovers the posture within 1e-3 rad") {
  // non-trivial alignment exercises both mappings
  const Transform glove_to_hand =
      compose(Transform::from_axis_angle(Vec3::UnitZ(), 0.3),
              Transform::from_translation(Vec3(0.01, -0.02, 0.05)));
  Fixture fx(glove_to_hand);
  Rng rng(91);
  for (int trial = 0; trial < 20; ++trial) {
    const JointStateMap truth = random_hand_posture(rng, fx.hand);
    const SensorFrame frame =
        simulate_glove(truth, fx.hand, fx.glove, fx.alignment, fx.calib, NoiseConfig::none());
    PipelineState state;
    const EstimateResult est = estimate_frame(frame, fx.calib, fx.glove, fx.alignment, fx.hand,
                                              pipeline_ik_defaults(), state);
    REQUIRE(est.joints.size() == truth.size());
    CHECK(max_joint_error(truth, est.joints) < 1e-3);
    CHECK(within_limits(fx.hand, est.joints));
    for (const auto& [finger, diag] : est.diagnostics) {
      CHECK(diag.converged);
    }
  }
}

TEST_CASE("all-zero raw frame with a zero-anchored calibration yields the straight posture") {
  // a glove that mimics the hand chain makes the zero posture self-consistent
  const HandDimensions dims = default_hand_dimensions();
  GloveGeometry geom;
  for (const std::string& finger : finger_names()) {
    const FingerDims& f = dims.fingers.at(finger);
    GloveFingerGeometry g;
    g.palm_to_r = f.palm_to_mcp;
    g.rod1_length = f.proximal_length;
    g.rod2_length = f.middle_length;
    g.tip_offset = Transform::from_translation(
        Vec3(f.distal_length + f.dip_to_tip.translation.x(), 0.0, 0.0));
    geom.fingers[finger] = g;
  }
  const KinematicModel glove = build_glove_model(geom);
  const KinematicModel hand = build_hand_model(dims);

  SensorCalibration calib;
  for (const std::string& name : glove.revolute_joint_names()) {
    const JointSpec& j = glove.joint(name);
    calib.channels[name] =
        ChannelCalibration{{{-1000, j.limits.lower}, {0, 0.0}, {1000, j.limits.upper}}};
  }

  SensorFrame frame;
  for (const std::string& name : glove.revolute_joint_names()) {
    frame.channels[name] = 0;
  }
  PipelineState state;
  const EstimateResult est = estimate_frame(frame, calib, glove, Alignment{}, hand,
                                            pipeline_ik_defaults(), state);
  for (const auto& [name, value] : est.joints) {
    CHECK(std::abs(value) < 1e-4);
  }
}

TEST_CASE("a tip outside the hand's reach yields converged=false and in-limit joints") {
  Fixture fx;
  // the default glove fully extended reaches past the hand's fingertip length
  SensorFrame frame;
  for (const std::string& name : fx.glove.revolute_joint_names()) {
    frame.channels[name] = static_cast<long>(
        std::lround(invert_channel(fx.calib.channels.at(name), 0.0)));
  }
  PipelineState state;
  const EstimateResult est =
      estimate_frame(frame, fx.calib, fx.glove, fx.alignment, fx.hand, pipeline_ik_defaults(), state);
  bool any_unconverged = false;
  for (const auto& [finger, diag] : est.diagnostics) {
    any_unconverged = any_unconverged || !diag.converged;
  }
  CHECK(any_unconverged);
  CHECK(within_limits(fx.hand, est.joints));
}

TEST_CASE("simulation is deterministic for a fixed seed and changes with the seed") {
  Fixture fx;
  Rng rng(92);
  const JointStateMap truth = random_hand_posture(rng, fx.hand);
  NoiseConfig noise;
  noise.sensor_noise_sd = 0.01;
  noise.rng_seed = 1234;
  const SensorFrame a = simulate_glove(truth, fx.hand, fx.glove, fx.alignment, fx.calib, noise);
  const SensorFrame b = simulate_glove(truth, fx.hand, fx.glove, fx.alignment, fx.calib, noise);
  CHECK(a.channels == b.channels);

  noise.rng_seed = 1235;
  const SensorFrame c = simulate_glove(truth, fx.hand, fx.glove, fx.alignment, fx.calib, noise);
  CHECK(a.channels != c.channels);
}

TEST_CASE("one-bit quantization collapses every channel to an anchor endpoint") {
  Fixture fx;
  Rng rng(93);
  const JointStateMap truth = random_hand_posture(rng, fx.hand);
  NoiseConfig noise;
  noise.adc_bits = 1;
  const SensorFrame frame = simulate_glove(truth, fx.hand, fx.glove, fx.alignment, fx.calib, noise);
  for (const auto& [name, raw] : frame.channels) {
    const auto& anchors = fx.calib.channels.at(name).anchors;
    const bool at_end = raw == anchors.front().raw || raw == anchors.back().raw;
    CHECK(at_end);
  }
}

TEST_CASE("a pure-translation slip moves the pre-IK tip target by exactly its magnitude") {
  // the glove wears the slipped alignment while the estimator still maps back
  // through the nominal one; with ideal sensing the injected target error is
  // the slip translation itself, for any alignment and any posture
  Rng rng(94);
  for (int trial = 0; trial < 100; ++trial) {
    const Transform alignment = test::random_transform(rng);
    const Transform hand_tip = test::random_transform(rng);
    const Vec3 slip_t(rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01),
                      rng.uniform(-0.01, 0.01));
    const Transform slip = Transform::from_translation(slip_t);

    const Transform tip_in_glove = compose(invert(compose(slip, alignment)), hand_tip);
    const Transform target = compose(alignment, tip_in_glove);
    CHECK(std::abs((target.translation - hand_tip.translation).norm() - slip_t.norm()) < 1e-12);
  }
}

TEST_CASE("process_stream handles empty input and keeps constant streams constant") {
  Fixture fx;
  CHECK(process_stream({}, fx.calib, fx.glove, fx.alignment, fx.hand, pipeline_ik_defaults())
            .empty());

  JointStateMap posture;
  for (const std::string& name : fx.hand.revolute_joint_names()) {
    posture[name] = 0.2;
  }
  std::vector<SensorFrame> frames;
  for (int i = 0; i < 250; ++i) {
    frames.push_back(simulate_glove(posture, fx.hand, fx.glove, fx.alignment, fx.calib,
                                    NoiseConfig::none(), i / 50.0));
  }
  const auto outputs =
      process_stream(frames, fx.calib, fx.glove, fx.alignment, fx.hand, pipeline_ik_defaults());
  REQUIRE(outputs.size() == 250);
  // frames after the first start from the converged solution and stay put
  for (std::size_t i = 1; i < outputs.size(); ++i) {
    CHECK(outputs[i].joints == outputs[1].joints);
  }
  for (const std::string& name : fx.hand.revolute_joint_names()) {
    std::vector<double> samples;
    for (const auto& o : outputs) {
      samples.push_back(o.joints.at(name));
    }
    double m = 0.0;
    for (double v : samples) {
      m += v;
    }
    m /= static_cast<double>(samples.size());
    double ss = 0.0;
    for (double v : samples) {
      ss += (v - m) * (v - m);
    }
    CHECK(std::sqrt(ss / static_cast<double>(samples.size() - 1)) < 1e-5);
  }
}

TEST_CASE("warm starts use fewer IK iterations than cold starts on a smooth ramp") {
  Fixture fx;
  std::vector<SensorFrame> frames;
  const int n = 50;
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    JointStateMap q;
    for (const std::string& finger : finger_names()) {
      q[finger + "_mcp_abduction"] = 0.0;
      q[finger + "_mcp_flexion"] = 1.2 * s;
      q[finger + "_pip"] = 1.5 * s;
      q[finger + "_dip"] = 0.9 * s;
    }
    frames.push_back(simulate_glove(q, fx.hand, fx.glove, fx.alignment, fx.calib,
                                    NoiseConfig::none(), i / 50.0));
  }

  const auto warm =
      process_stream(frames, fx.calib, fx.glove, fx.alignment, fx.hand, pipeline_ik_defaults());
  long warm_iters = 0;
  for (const auto& o : warm) {
    for (const auto& [finger, diag] : o.diagnostics) {
      warm_iters += diag.iterations;
    }
  }

  long cold_iters = 0;
  for (const SensorFrame& f : frames) {
    PipelineState fresh;
    const EstimateResult est =
        estimate_frame(f, fx.calib, fx.glove, fx.alignment, fx.hand, pipeline_ik_defaults(), fresh);
    for (const auto& [finger, diag] : est.diagnostics) {
      cold_iters += diag.iterations;
    }
  }
  CHECK(warm_iters < cold_iters);
}

TEST_CASE("stream validation: timestamps and channel sets") {
  Fixture fx;
  JointStateMap posture;
  for (const std::string& name : fx.hand.revolute_joint_names()) {
    posture[name] = 0.1;
  }
  SensorFrame f0 =
      simulate_glove(posture, fx.hand, fx.glove, fx.alignment, fx.calib, NoiseConfig::none(), 1.0);
  SensorFrame f1 = f0;
  f1.timestamp = 0.5;
  CHECK_THROWS_WITH_AS(static_cast<void>(process_stream({f0, f1}, fx.calib, fx.glove, fx.alignment,
                                                        fx.hand, pipeline_ik_defaults())),
                       doctest::Contains("frame 1"), DataError);

  SensorFrame f2 = f0;
  f2.timestamp = 2.0;
  f2.channels.erase(f2.channels.begin());
  CHECK_THROWS_WITH_AS(static_cast<void>(process_stream({f0, f2}, fx.calib, fx.glove, fx.alignment,
                                                        fx.hand, pipeline_ik_defaults())),
                       doctest::Contains("channel set"), DataError);
}

TEST_CASE("partial finger coverage is an error, absent fingers are skipped") {
  Fixture fx;
  JointStateMap index_only{{"index_mcp_abduction", 0.0},
                           {"index_mcp_flexion", 0.3},
                           {"index_pip", 0.5},
                           {"index_dip", 0.2}};
  const SensorFrame frame =
      simulate_glove(index_only, fx.hand, fx.glove, fx.alignment, fx.calib, NoiseConfig::none());
  CHECK(frame.channels.size() == 5);  // only the index channels

  PipelineState state;
  const EstimateResult est =
      estimate_frame(frame, fx.calib, fx.glove, fx.alignment, fx.hand, pipeline_ik_defaults(), state);
  CHECK(est.joints.size() == 4);
  CHECK(est.diagnostics.size() == 1);
  CHECK(est.diagnostics.count("index") == 1);

  SensorFrame partial = frame;
  partial.channels.erase("index_T");
  CHECK_THROWS_WITH_AS(static_cast<void>(estimate_frame(partial, fx.calib, fx.glove, fx.alignment,
                                                        fx.hand, pipeline_ik_defaults(), state)),
                       doctest::Contains("partially"), DataError);

  JointStateMap missing_dip = index_only;
  missing_dip.erase("index_dip");
  CHECK_THROWS_AS(static_cast<void>(simulate_glove(missing_dip, fx.hand, fx.glove, fx.alignment,
                                                   fx.calib, NoiseConfig::none())),
                  DataError);
}

TEST_CASE("simulate_glove rejects out-of-limit postures and non-canonical gloves") {
  Fixture fx;
  JointStateMap bad{{"index_mcp_abduction", 0.0},
                    {"index_mcp_flexion", 2.5},  // beyond the 1.6 rad limit
                    {"index_pip", 0.0},
                    {"index_dip", 0.0}};
  CHECK_THROWS_WITH_AS(static_cast<void>(simulate_glove(bad, fx.hand, fx.glove, fx.alignment,
                                                        fx.calib, NoiseConfig::none())),
                       doctest::Contains("limits"), DataError);

  GloveGeometry geom = default_glove_geometry(fx.dims);
  geom.fingers["index"].s_axis = Vec3::UnitY();
  geom.fingers["index"].b_axis = Vec3::UnitZ();
  const KinematicModel skewed = build_glove_model(geom);
  CHECK_THROWS_WITH_AS(
      static_cast<void>(solve_glove_joints(skewed, "index", Transform::identity())),
      doctest::Contains("canonical"), DataError);
}

TEST_CASE("default glove reaches the whole default hand limit box") {
  // grid over each finger's limit box, corners included; every posture must
  // simulate without a reachability error across the hand-length range
  for (double hand_length : {0.152, 0.172, 0.192}) {
    const HandDimensions dims = default_hand_dimensions(hand_length);
    const KinematicModel hand = build_hand_model(dims);
    const KinematicModel glove = build_glove_model(default_glove_geometry(dims));
    const SensorCalibration calib = default_calibration(glove);
    for (const std::string& finger : finger_names()) {
      const FingerDims& f = dims.fingers.at(finger);
      auto grid = [](const JointLimits& lim) {
        return std::array<double, 3>{lim.lower, 0.5 * (lim.lower + lim.upper), lim.upper};
      };
      for (double abd : grid(f.limits.mcp_abduction)) {
        for (double mcp : grid(f.limits.mcp_flexion)) {
          for (double pip : grid(f.limits.pip)) {
            for (double dip : grid(f.limits.dip)) {
              const JointStateMap q{{finger + "_mcp_abduction", abd},
                                    {finger + "_mcp_flexion", mcp},
                                    {finger + "_pip", pip},
                                    {finger + "_dip", dip}};
              CHECK_NOTHROW(static_cast<void>(
                  simulate_glove(q, hand, glove, Alignment{}, calib, NoiseConfig::none())));
            }
          }
        }
      }
    }
  }
}

TEST_CASE("glove annulus violations report the finger and the distance") {
  Fixture fx;
  Transform far_tip;
  far_tip.translation = apply(fx.dims.fingers.at("index").palm_to_mcp, Vec3(0.5, 0, 0));
  CHECK_THROWS_WITH_AS(static_cast<void>(solve_glove_joints(fx.glove, "index", far_tip)),
                       doctest::Contains("unreachable"), DataError);
}

TEST_CASE("sensor stream text round trips and validates line by line") {
  Fixture fx;
  JointStateMap posture;
  for (const std::string& name : fx.hand.revolute_joint_names()) {
    posture[name] = 0.15;
  }
  std::vector<SensorFrame> frames;
  for (int i = 0; i < 3; ++i) {
    frames.push_back(simulate_glove(posture, fx.hand, fx.glove, fx.alignment, fx.calib,
                                    NoiseConfig::none(), 0.1 * i));
  }
  const std::string text = write_sensor_stream(frames);
  const std::vector<SensorFrame> back = read_sensor_stream(text);
  REQUIRE(back.size() == frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    CHECK(back[i].timestamp == frames[i].timestamp);
    CHECK(back[i].channels == frames[i].channels);
  }

  CHECK_THROWS_WITH_AS(static_cast<void>(read_sensor_stream("{\"nope\": 1}\n")),
                       doctest::Contains("header"), DataError);

  std::string corrupt = text;
  corrupt += "{not json\n";  // line 5: header + 3 frames + this
  CHECK_THROWS_WITH_AS(static_cast<void>(read_sensor_stream(corrupt)),
                       doctest::Contains("line 5"), DataError);

  const std::string float_raw =
      "{\"format\":\"handkin/v1\"}\n{\"t\":0,\"channels\":{\"index_B\":12.5}}\n";
  CHECK_THROWS_WITH_AS(static_cast<void>(read_sensor_stream(float_raw)),
                       doctest::Contains("integer"), DataError);
}

TEST_CASE("noise config validation") {
  NoiseConfig noise;
  noise.adc_bits = 0;
  CHECK_THROWS_AS(validate_noise(noise), ValidationError);
  noise = NoiseConfig::none();
  noise.sensor_noise_sd = -0.1;
  CHECK_THROWS_AS(validate_noise(noise), ValidationError);
}
