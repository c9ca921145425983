#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "handkin/calibration.hpp"
#include "handkin/ik.hpp"
#include "handkin/model.hpp"

namespace handkin {

/// Synthetic-sensing knobs for the simulation path. The default
/// configuration is the no-noise case: no ADC quantization (raw counts are
/// only rounded to integers on the calibration scale), no offsets, identity
/// slip, zero Gaussian noise.
struct NoiseConfig {
  std::optional<int> adc_bits;                       // quantization, in [1, 16] when set
  std::map<std::string, double> calibration_offset;  // channel -> radians
  Transform slip;                                    // alignment perturbation (hand side)
  double sensor_noise_sd = 0.0;                      // radians, zero-mean Gaussian
  std::uint64_t rng_seed = 0;

  static NoiseConfig none() { return {}; }
};

void validate_noise(const NoiseConfig& noise);

struct FingerDiagnostics {
  bool converged = false;
  double position_residual = 0.0;     // m
  double orientation_residual = 0.0;  // rad
  int iterations = 0;
};

using DiagnosticsMap = std::map<std::string, FingerDiagnostics>;

/// Cross-frame state: the previous solution seeds the next frame's solve.
/// A fresh state seeds from the all-zero (straight) posture.
struct PipelineState {
  JointStateMap seed;
  DiagnosticsMap last_diagnostics;
};

struct EstimateResult {
  JointStateMap joints;
  DiagnosticsMap diagnostics;
};

/// IK settings used by the pipeline when the caller does not supply its own
/// (currently the solver defaults).
IkConfig pipeline_ik_defaults();

/// One frame through the forward dataflow: calibrated glove joints ->
/// glove FK tip poses -> alignment into hand space -> per-finger hand IK
/// (seeded from state). Fingers are solved independently; a finger is
/// processed when all five of its channels are present in the frame and
/// skipped when none are. Unreachable targets produce converged=false
/// diagnostics, never an error.
EstimateResult estimate_frame(const SensorFrame& frame, const SensorCalibration& calib,
                              const KinematicModel& glove, const Alignment& alignment,
                              const KinematicModel& hand, const IkConfig& cfg,
                              PipelineState& state);

/// Closed-form glove joint angles that place "<finger>tip" at the given pose
/// (expressed in the glove base frame). R stays zero and S takes the
/// out-of-plane angle; B and F come from the two-rod circle intersection and
/// T from the remaining orientation. Requires the canonical linkage layout
/// produced by build_glove_model with per-finger axes R=x, S=z, B=F=T=y.
/// Throws DataError (with finger name and residual) when the pose is outside
/// the rod annulus or a solved angle violates a glove joint limit.
JointStateMap solve_glove_joints(const KinematicModel& glove, const std::string& finger,
                                 const Transform& tip_in_glove);

/// Inverse dataflow for hardware-free testing: hand FK tip poses -> glove
/// space via the (slip-perturbed) alignment -> closed-form glove joints ->
/// inverse calibration -> quantized raw counts plus seeded Gaussian noise.
/// Only fingers fully covered by hand_q are emitted. Deterministic for a
/// fixed noise.rng_seed.
SensorFrame simulate_glove(const JointStateMap& hand_q, const KinematicModel& hand,
                           const KinematicModel& glove, const Alignment& alignment,
                           const SensorCalibration& calib, const NoiseConfig& noise,
                           double timestamp = 0.0);

struct StreamOutput {
  double timestamp = 0.0;
  JointStateMap joints;
  DiagnosticsMap diagnostics;
};

/// Sequential estimate_frame with state threading. Frames must have
/// non-decreasing timestamps and a constant channel set; the first offending
/// frame aborts with its index.
std::vector<StreamOutput> process_stream(const std::vector<SensorFrame>& frames,
                                         const SensorCalibration& calib,
                                         const KinematicModel& glove,
                                         const Alignment& alignment,
                                         const KinematicModel& hand, const IkConfig& cfg);

/// Line-delimited stream formats, versioned with a {"format":"handkin/v1"}
/// header line. Sensor records: {"t": s, "channels": {"index_B": int, ...}}.
/// Output records: {"t": s, "joints": {...}, "diagnostics":
/// {"<finger>": {"converged", "pos_residual", "iters"}}}.
std::vector<SensorFrame> read_sensor_stream(const std::string& text);
std::string write_sensor_stream(const std::vector<SensorFrame>& frames);
std::string write_estimate_stream(const std::vector<StreamOutput>& outputs);

/// IK config record {"max_iterations", "position_tolerance", ...}; absent
/// fields keep the pipeline defaults.
IkConfig parse_ik_config(const std::string& text);

}  // namespace handkin
