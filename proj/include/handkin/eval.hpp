#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "handkin/models.hpp"
#include "handkin/pipeline.hpp"

namespace handkin {

enum class FingerJoint { mcp, pip, dip };

std::string to_string(FingerJoint j);
FingerJoint finger_joint_from_string(const std::string& name);

/// MCP/PIP/DIP flexion triple, radians.
struct JointTriple {
  double mcp = 0.0;
  double pip = 0.0;
  double dip = 0.0;

  double get(FingerJoint j) const;
};

enum class Estimator { kinematic, baseline };

struct TrialSpec {
  FingerJoint bent_joint = FingerJoint::mcp;
  double target_angle = 0.0;  // radians
  int block = 0;
  int repetition = 0;
};

struct TrialResult {
  int participant = 0;
  TrialSpec spec;
  JointTriple mean_estimates;  // mean over the trial's frames
  Estimator estimator = Estimator::kinematic;
};

/// Linear coupling between full extension (0,0,0) and a power grasp; the
/// stand-in for the vendor's single-bend-value regression.
struct CouplingConfig {
  JointTriple grasp_endpoint{70.0 * EIGEN_PI / 180.0, 100.0 * EIGEN_PI / 180.0,
                             60.0 * EIGEN_PI / 180.0};
};

/// Each joint at alpha_norm * grasp_endpoint; alpha_norm must lie in [0, 1].
JointTriple baseline_estimate(double alpha_norm, const CouplingConfig& cfg);

struct ProtocolConfig {
  int participants = 12;
  std::vector<double> targets_deg = {20.0, 45.0};
  std::vector<FingerJoint> joints = {FingerJoint::mcp, FingerJoint::pip, FingerJoint::dip};
  int blocks = 6;
  int reps_per_block = 1;
  std::uint64_t seed = 0;
  bool has_seed = false;  // set when the seed came from a config file or flag
  NoiseConfig noise;
  CouplingConfig coupling;
  double jitter_sd_deg = 2.0;  // posture-holding jitter of the synthetic participant
  double rate_hz = 50.0;
  double duration_s = 5.0;
  double hand_length_min_m = 0.152;
  double hand_length_max_m = 0.192;
};

struct ProtocolRun {
  std::vector<TrialResult> results;
  std::vector<std::string> log;  // skipped-trial reports
};

/// Runs the study protocol for synthetic participants: per participant a
/// scaled hand, a fitted glove, and blocks of randomized single-joint-bend
/// conditions; each trial simulates a sensor stream of the jittered posture
/// and records per-joint means for both estimators. Deterministic for a
/// fixed seed; participants run independently (jobs > 1 splits them across
/// threads without changing the output).
ProtocolRun run_protocol(const ProtocolConfig& cfg,
                         const std::vector<HandDimensions>& dims_override = {}, int jobs = 1);

struct AnnotatedFrame {
  int participant = 0;
  TrialSpec spec;
  SensorFrame frame;
};

/// The simulation side of run_protocol only: every sensor frame the protocol
/// would feed to the estimators, annotated with its trial. Shares the random
/// streams with run_protocol, so the frames are identical to the ones an
/// evaluation with the same config consumes.
std::vector<AnnotatedFrame> simulate_protocol_frames(const ProtocolConfig& cfg,
                                                     std::vector<std::string>* log = nullptr);

/// Sensor-stream format with a per-record "trial" annotation object.
std::string write_protocol_frames(const std::vector<AnnotatedFrame>& frames);

/// Angular-distance metric columns in trial order: bent joint, MCP, PIP, DIP.
struct MetricColumns {
  double bent_joint = 0.0;
  double mcp = 0.0;
  double pip = 0.0;
  double dip = 0.0;
};

struct EstimatorStats {
  std::vector<MetricColumns> per_participant;  // per-participant means, radians
  MetricColumns mean;                          // across participants
  MetricColumns sd;
};

struct TTestResult {
  double t = 0.0;
  int df = 0;
  double p = 1.0;
};

/// Two-sided paired t-test: d = a - b, t = mean(d) / (sd(d)/sqrt(n)).
/// Throws DataError on length mismatch, n < 2, or zero-variance differences.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

struct MetricsReport {
  EstimatorStats kinematic;
  EstimatorStats baseline;
  std::array<TTestResult, 4> tests;  // kinematic vs baseline, per metric column
  int participants = 0;
};

/// Per-trial distances |estimate - expected| (expected = target for the bent
/// joint, 0 otherwise), then per-participant means, then cross-participant
/// statistics and paired t-tests. Trials must pair up across estimators.
MetricsReport compute_metrics(const std::vector<TrialResult>& results);

enum class ReportFormat { table_text, csv, structured };

/// Deterministic byte output; table-text prints degrees with 2 decimals in
/// rows M, SD per estimator plus t and p.
std::string emit_report(const MetricsReport& report, ReportFormat format);

ProtocolConfig parse_protocol_config(const std::string& text);
NoiseConfig parse_noise_config(const std::string& text);

}  // namespace handkin
