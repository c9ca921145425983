#include "handkin/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "handkin/errors.hpp"
#include "handkin/json_util.hpp"
#include "handkin/kinematics.hpp"
#include "handkin/rng.hpp"
#include "handkin/stats.hpp"

namespace handkin {

namespace {

constexpr double kDegToRad = EIGEN_PI / 180.0;
constexpr double kRadToDeg = 180.0 / EIGEN_PI;

}  // namespace

std::string to_string(FingerJoint j) {
  switch (j) {
    case FingerJoint::mcp:
      return "MCP";
    case FingerJoint::pip:
      return "PIP";
    case FingerJoint::dip:
      return "DIP";
  }
  return "?";
}

FingerJoint finger_joint_from_string(const std::string& name) {
  if (name == "MCP") return FingerJoint::mcp;
  if (name == "PIP") return FingerJoint::pip;
  if (name == "DIP") return FingerJoint::dip;
  throw ParseError("unknown joint name '" + name + "' (expected MCP, PIP or DIP)");
}

double JointTriple::get(FingerJoint j) const {
  switch (j) {
    case FingerJoint::mcp:
      return mcp;
    case FingerJoint::pip:
      return pip;
    case FingerJoint::dip:
      return dip;
  }
  return 0.0;
}

JointTriple baseline_estimate(double alpha_norm, const CouplingConfig& cfg) {
  if (!(alpha_norm >= 0.0 && alpha_norm <= 1.0)) {
    throw DataError("baseline_estimate: alpha_norm outside [0, 1]");
  }
  return JointTriple{alpha_norm * cfg.grasp_endpoint.mcp, alpha_norm * cfg.grasp_endpoint.pip,
                     alpha_norm * cfg.grasp_endpoint.dip};
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DataError("paired_t_test: sample length mismatch");
  }
  if (a.size() < 2) {
    throw DataError("paired_t_test: need at least 2 pairs");
  }
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    d[i] = a[i] - b[i];
  }
  const double sd = sample_sd(d);
  if (sd == 0.0) {
    throw DataError("paired_t_test: zero variance of differences (degenerate)");
  }
  TTestResult r;
  r.df = static_cast<int>(a.size()) - 1;
  r.t = mean(d) / (sd / std::sqrt(static_cast<double>(a.size())));
  r.p = student_t_two_sided_p(r.t, static_cast<double>(r.df));
  return r;
}

namespace {

void validate_protocol(const ProtocolConfig& cfg) {
  if (cfg.participants < 1) {
    throw ValidationError("protocol: participants must be >= 1");
  }
  if (cfg.blocks < 1 || cfg.reps_per_block < 1) {
    throw ValidationError("protocol: blocks and reps_per_block must be >= 1");
  }
  if (cfg.targets_deg.empty() || cfg.joints.empty()) {
    throw ValidationError("protocol: need at least one target angle and one joint");
  }
  for (double t : cfg.targets_deg) {
    if (!(t > 0.0 && t <= 90.0)) {
      throw ValidationError("protocol: target angles must lie in (0, 90] degrees");
    }
  }
  if (cfg.rate_hz <= 0.0 || cfg.duration_s <= 0.0) {
    throw ValidationError("protocol: rate_hz and duration_s must be positive");
  }
  if (cfg.jitter_sd_deg < 0.0) {
    throw ValidationError("protocol: jitter_sd_deg must be >= 0");
  }
  if (!(cfg.hand_length_min_m > 0.0) || cfg.hand_length_max_m < cfg.hand_length_min_m) {
    throw ValidationError("protocol: invalid hand length range");
  }
  if (!(cfg.coupling.grasp_endpoint.mcp > 0.0 && cfg.coupling.grasp_endpoint.pip > 0.0 &&
        cfg.coupling.grasp_endpoint.dip > 0.0)) {
    throw ValidationError("protocol: coupling grasp endpoint components must be > 0");
  }
  validate_noise(cfg.noise);
}

struct Condition {
  FingerJoint joint;
  double target_rad;
};

const char* kFinger = "index";

JointStateMap index_posture(double abd, const JointTriple& flexions) {
  return JointStateMap{{"index_mcp_abduction", abd},
                       {"index_mcp_flexion", flexions.mcp},
                       {"index_pip", flexions.pip},
                       {"index_dip", flexions.dip}};
}

struct ParticipantOutput {
  std::vector<TrialResult> results;
  std::vector<std::string> log;
};

ParticipantOutput run_participant(const ProtocolConfig& cfg, int participant,
                                  const HandDimensions* dims_override,
                                  std::vector<AnnotatedFrame>* frame_sink, bool run_estimators) {
  ParticipantOutput out;
  Rng rng(Rng::derive(cfg.seed, static_cast<std::uint64_t>(participant)));

  HandDimensions dims;
  if (dims_override != nullptr) {
    dims = *dims_override;
  } else {
    dims = default_hand_dimensions(rng.uniform(cfg.hand_length_min_m, cfg.hand_length_max_m));
  }
  const KinematicModel hand = build_hand_model(dims);
  const KinematicModel glove = build_glove_model(default_glove_geometry(dims));
  const SensorCalibration calib = default_calibration(glove);
  const Alignment alignment{Transform::identity()};
  const IkConfig ik_cfg = pipeline_ik_defaults();
  const FingerDims& index_dims = dims.fingers.at(kFinger);

  // vendor-style calibration profile: B channel at the two extreme postures
  auto index_b_at = [&](const JointStateMap& q) {
    const Transform tip = forward_kinematics(hand, q, "indextip");
    const Transform tip_in_glove = compose(invert(alignment.glove_to_hand), tip);
    return solve_glove_joints(glove, kFinger, tip_in_glove).at("index_B");
  };
  const JointTriple& grasp = cfg.coupling.grasp_endpoint;
  auto check_in = [&](double v, const JointLimits& lim, const char* what) {
    if (v < lim.lower || v > lim.upper) {
      throw ValidationError(std::string("protocol: ") + what + " outside the hand's joint limits");
    }
  };
  check_in(grasp.mcp, index_dims.limits.mcp_flexion, "coupling grasp (MCP)");
  check_in(grasp.pip, index_dims.limits.pip, "coupling grasp (PIP)");
  check_in(grasp.dip, index_dims.limits.dip, "coupling grasp (DIP)");
  const double b_ext = index_b_at(index_posture(0.0, JointTriple{}));
  const double b_grasp = index_b_at(index_posture(0.0, grasp));
  if (std::abs(b_grasp - b_ext) < 1e-9) {
    throw ValidationError("protocol: degenerate coupling calibration (grasp B equals extension B)");
  }

  std::vector<Condition> conditions;
  for (FingerJoint joint : cfg.joints) {
    for (double target_deg : cfg.targets_deg) {
      const double target = target_deg * kDegToRad;
      const JointLimits& lim = joint == FingerJoint::mcp ? index_dims.limits.mcp_flexion
                               : joint == FingerJoint::pip ? index_dims.limits.pip
                                                           : index_dims.limits.dip;
      check_in(target, lim, "trial target");
      conditions.push_back(Condition{joint, target});
    }
  }

  const int n_frames = std::max(1, static_cast<int>(std::lround(cfg.rate_hz * cfg.duration_s)));
  const double jitter_sd = cfg.jitter_sd_deg * kDegToRad;
  const ChannelCalibration& b_channel = calib.channels.at("index_B");

  std::map<FingerJoint, int> repetition_count;
  for (int block = 0; block < cfg.blocks; ++block) {
    std::vector<Condition> order;
    for (int rep = 0; rep < cfg.reps_per_block; ++rep) {
      order.insert(order.end(), conditions.begin(), conditions.end());
    }
    rng.shuffle(order);

    for (const Condition& cond : order) {
      TrialSpec spec;
      spec.bent_joint = cond.joint;
      spec.target_angle = cond.target_rad;
      spec.block = block;
      spec.repetition = repetition_count[cond.joint]++;

      JointTriple base;
      if (cond.joint == FingerJoint::mcp) base.mcp = cond.target_rad;
      if (cond.joint == FingerJoint::pip) base.pip = cond.target_rad;
      if (cond.joint == FingerJoint::dip) base.dip = cond.target_rad;

      PipelineState state;
      JointTriple kin_sum, base_sum;
      bool skipped = false;
      const std::size_t sink_mark = frame_sink != nullptr ? frame_sink->size() : 0;
      for (int i = 0; i < n_frames && !skipped; ++i) {
        JointTriple flex{base.mcp + jitter_sd * rng.normal(), base.pip + jitter_sd * rng.normal(),
                         base.dip + jitter_sd * rng.normal()};
        const double abd = jitter_sd * rng.normal();
        JointStateMap truth = index_posture(abd, flex);
        truth = clamp_to_limits(hand, truth);

        NoiseConfig frame_noise = cfg.noise;
        frame_noise.rng_seed = rng.bits();
        SensorFrame frame;
        try {
          frame = simulate_glove(truth, hand, glove, alignment, calib, frame_noise,
                                 static_cast<double>(i) / cfg.rate_hz);
        } catch (const DataError& e) {
          std::ostringstream msg;
          msg << "participant " << participant << " block " << block << " "
              << to_string(cond.joint) << "@" << cond.target_rad * kRadToDeg
              << "deg: trial skipped: " << e.what();
          out.log.push_back(msg.str());
          skipped = true;
          break;
        }
        if (frame_sink != nullptr) {
          frame_sink->push_back(AnnotatedFrame{participant, spec, frame});
        }
        if (!run_estimators) {
          continue;
        }

        const EstimateResult est =
            estimate_frame(frame, calib, glove, alignment, hand, ik_cfg, state);
        kin_sum.mcp += est.joints.at("index_mcp_flexion");
        kin_sum.pip += est.joints.at("index_pip");
        kin_sum.dip += est.joints.at("index_dip");

        const double alpha_b = calibrated_angle(b_channel, static_cast<double>(frame.channels.at("index_B")));
        double alpha_norm = (alpha_b - b_ext) / (b_grasp - b_ext);
        alpha_norm = std::clamp(alpha_norm, 0.0, 1.0);
        const JointTriple coupled = baseline_estimate(alpha_norm, cfg.coupling);
        base_sum.mcp += coupled.mcp;
        base_sum.pip += coupled.pip;
        base_sum.dip += coupled.dip;
      }
      if (skipped) {
        if (frame_sink != nullptr) {
          frame_sink->resize(sink_mark);  // drop the partial trial
        }
        continue;
      }
      if (!run_estimators) {
        continue;
      }
      const double inv_n = 1.0 / static_cast<double>(n_frames);
      TrialResult kin;
      kin.participant = participant;
      kin.spec = spec;
      kin.mean_estimates = JointTriple{kin_sum.mcp * inv_n, kin_sum.pip * inv_n, kin_sum.dip * inv_n};
      kin.estimator = Estimator::kinematic;
      out.results.push_back(kin);

      TrialResult base_result = kin;
      base_result.mean_estimates =
          JointTriple{base_sum.mcp * inv_n, base_sum.pip * inv_n, base_sum.dip * inv_n};
      base_result.estimator = Estimator::baseline;
      out.results.push_back(base_result);
    }
  }
  return out;
}

}  // namespace

ProtocolRun run_protocol(const ProtocolConfig& cfg, const std::vector<HandDimensions>& dims_override,
                         int jobs) {
  validate_protocol(cfg);
  if (!dims_override.empty() &&
      dims_override.size() != static_cast<std::size_t>(cfg.participants)) {
    throw ValidationError("protocol: dims override must list one hand per participant");
  }

  std::vector<ParticipantOutput> outputs(static_cast<std::size_t>(cfg.participants));
  const int workers = std::clamp(jobs, 1, cfg.participants);
  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      const int p = next.fetch_add(1);
      if (p >= cfg.participants) {
        return;
      }
      const HandDimensions* dims =
          dims_override.empty() ? nullptr : &dims_override[static_cast<std::size_t>(p)];
      outputs[static_cast<std::size_t>(p)] = run_participant(cfg, p, dims, nullptr, true);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) {
      threads.emplace_back(work);
    }
    for (std::thread& t : threads) {
      t.join();
    }
  }

  ProtocolRun run;
  for (ParticipantOutput& o : outputs) {
    run.results.insert(run.results.end(), o.results.begin(), o.results.end());
    run.log.insert(run.log.end(), o.log.begin(), o.log.end());
  }
  return run;
}

std::vector<AnnotatedFrame> simulate_protocol_frames(const ProtocolConfig& cfg,
                                                     std::vector<std::string>* log) {
  validate_protocol(cfg);
  std::vector<AnnotatedFrame> frames;
  for (int p = 0; p < cfg.participants; ++p) {
    ParticipantOutput out = run_participant(cfg, p, nullptr, &frames, false);
    if (log != nullptr) {
      log->insert(log->end(), out.log.begin(), out.log.end());
    }
  }
  return frames;
}

std::string write_protocol_frames(const std::vector<AnnotatedFrame>& frames) {
  std::ostringstream out;
  out << "{\"format\":\"handkin/v1\"}\n";
  for (const AnnotatedFrame& af : frames) {
    Json j = Json::object();
    j["t"] = af.frame.timestamp;
    Json channels = Json::object();
    for (const auto& [name, raw] : af.frame.channels) {
      channels[name] = raw;
    }
    j["channels"] = channels;
    j["trial"] = Json{{"participant", af.participant},
                      {"block", af.spec.block},
                      {"repetition", af.spec.repetition},
                      {"joint", to_string(af.spec.bent_joint)},
                      {"target_deg", af.spec.target_angle * kRadToDeg}};
    out << j.dump() << "\n";
  }
  return out.str();
}

namespace {

MetricColumns phi_columns(const TrialSpec& spec, const JointTriple& est) {
  auto expected = [&](FingerJoint j) { return j == spec.bent_joint ? spec.target_angle : 0.0; };
  MetricColumns phi;
  phi.bent_joint = std::abs(est.get(spec.bent_joint) - spec.target_angle);
  phi.mcp = std::abs(est.mcp - expected(FingerJoint::mcp));
  phi.pip = std::abs(est.pip - expected(FingerJoint::pip));
  phi.dip = std::abs(est.dip - expected(FingerJoint::dip));
  return phi;
}

MetricColumns columns_mean(const std::vector<MetricColumns>& rows) {
  MetricColumns m;
  for (const MetricColumns& r : rows) {
    m.bent_joint += r.bent_joint;
    m.mcp += r.mcp;
    m.pip += r.pip;
    m.dip += r.dip;
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  return MetricColumns{m.bent_joint * inv, m.mcp * inv, m.pip * inv, m.dip * inv};
}

std::array<double, 4> to_array(const MetricColumns& c) {
  return {c.bent_joint, c.mcp, c.pip, c.dip};
}

MetricColumns from_array(const std::array<double, 4>& a) {
  return MetricColumns{a[0], a[1], a[2], a[3]};
}

EstimatorStats finalize_stats(std::vector<MetricColumns> per_participant) {
  EstimatorStats stats;
  stats.per_participant = std::move(per_participant);
  std::array<double, 4> means{};
  std::array<double, 4> sds{};
  for (int c = 0; c < 4; ++c) {
    std::vector<double> column;
    column.reserve(stats.per_participant.size());
    for (const MetricColumns& row : stats.per_participant) {
      column.push_back(to_array(row)[static_cast<std::size_t>(c)]);
    }
    means[static_cast<std::size_t>(c)] = mean(column);
    sds[static_cast<std::size_t>(c)] = column.size() >= 2 ? sample_sd(column) : 0.0;
  }
  stats.mean = from_array(means);
  stats.sd = from_array(sds);
  return stats;
}

}  // namespace

MetricsReport compute_metrics(const std::vector<TrialResult>& results) {
  if (results.empty()) {
    throw DataError("compute_metrics: no trial results");
  }

  using TrialKey = std::tuple<int, int, int, int, double>;
  auto key_of = [](const TrialResult& r) {
    return TrialKey{r.participant, r.spec.block, r.spec.repetition,
                    static_cast<int>(r.spec.bent_joint), r.spec.target_angle};
  };
  struct Pair {
    const TrialResult* kinematic = nullptr;
    const TrialResult* baseline = nullptr;
  };
  std::map<TrialKey, Pair> pairs;
  for (const TrialResult& r : results) {
    Pair& p = pairs[key_of(r)];
    (r.estimator == Estimator::kinematic ? p.kinematic : p.baseline) = &r;
  }

  std::map<int, std::pair<std::vector<MetricColumns>, std::vector<MetricColumns>>> by_participant;
  for (const auto& [key, pair] : pairs) {
    if (pair.kinematic == nullptr || pair.baseline == nullptr) {
      throw DataError("compute_metrics: trial present for only one estimator");
    }
    auto& [kin_rows, base_rows] = by_participant[pair.kinematic->participant];
    kin_rows.push_back(phi_columns(pair.kinematic->spec, pair.kinematic->mean_estimates));
    base_rows.push_back(phi_columns(pair.baseline->spec, pair.baseline->mean_estimates));
  }

  std::vector<MetricColumns> kin_means, base_means;
  for (const auto& [participant, rows] : by_participant) {
    kin_means.push_back(columns_mean(rows.first));
    base_means.push_back(columns_mean(rows.second));
  }

  MetricsReport report;
  report.participants = static_cast<int>(by_participant.size());
  report.kinematic = finalize_stats(std::move(kin_means));
  report.baseline = finalize_stats(std::move(base_means));
  if (report.participants >= 2) {
    for (int c = 0; c < 4; ++c) {
      std::vector<double> a, b;
      for (const MetricColumns& row : report.kinematic.per_participant) {
        a.push_back(to_array(row)[static_cast<std::size_t>(c)]);
      }
      for (const MetricColumns& row : report.baseline.per_participant) {
        b.push_back(to_array(row)[static_cast<std::size_t>(c)]);
      }
      report.tests[static_cast<std::size_t>(c)] = paired_t_test(a, b);
    }
  } else {
    for (auto& t : report.tests) {
      t = TTestResult{std::nan(""), 0, std::nan("")};
    }
  }
  return report;
}

namespace {

std::string format_fixed(double v, int decimals) {
  if (std::isnan(v)) {
    return "n/a";
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string format_p(double p) {
  if (std::isnan(p)) {
    return "n/a";
  }
  if (p < 0.0005) {
    return "<0.001";
  }
  return format_fixed(p, 3);
}

std::string table_row(const std::string& label, const std::array<std::string, 4>& cells) {
  std::ostringstream out;
  out << label;
  for (std::size_t i = label.size(); i < 20; ++i) {
    out << ' ';
  }
  for (const std::string& c : cells) {
    for (std::size_t i = c.size(); i < 15; ++i) {
      out << ' ';
    }
    out << c;
  }
  out << "\n";
  return out.str();
}

std::array<std::string, 4> deg_cells(const MetricColumns& c, int decimals) {
  return {format_fixed(c.bent_joint * kRadToDeg, decimals),
          format_fixed(c.mcp * kRadToDeg, decimals), format_fixed(c.pip * kRadToDeg, decimals),
          format_fixed(c.dip * kRadToDeg, decimals)};
}

std::string emit_table(const MetricsReport& r) {
  std::ostringstream out;
  out << table_row("", {"phi_bentjoint", "phi_MCP", "phi_PIP", "phi_DIP"});
  out << table_row("M_kinematic [deg]", deg_cells(r.kinematic.mean, 2));
  out << table_row("M_baseline [deg]", deg_cells(r.baseline.mean, 2));
  out << table_row("SD_kinematic [deg]", deg_cells(r.kinematic.sd, 2));
  out << table_row("SD_baseline [deg]", deg_cells(r.baseline.sd, 2));
  const std::string t_label = "t(" + std::to_string(r.tests[0].df) + ")";
  out << table_row(t_label, {format_fixed(r.tests[0].t, 2), format_fixed(r.tests[1].t, 2),
                             format_fixed(r.tests[2].t, 2), format_fixed(r.tests[3].t, 2)});
  out << table_row("p", {format_p(r.tests[0].p), format_p(r.tests[1].p), format_p(r.tests[2].p),
                         format_p(r.tests[3].p)});
  return out.str();
}

std::string format_g(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string csv_row(const std::string& label, const std::array<double, 4>& cells) {
  std::ostringstream out;
  out << label;
  for (double c : cells) {
    out << ',' << format_g(c);
  }
  out << "\n";
  return out.str();
}

std::array<double, 4> deg_array(const MetricColumns& c) {
  return {c.bent_joint * kRadToDeg, c.mcp * kRadToDeg, c.pip * kRadToDeg, c.dip * kRadToDeg};
}

std::string emit_csv(const MetricsReport& r) {
  std::ostringstream out;
  out << "row,phi_bentjoint,phi_mcp,phi_pip,phi_dip\n";
  out << csv_row("m_kinematic_deg", deg_array(r.kinematic.mean));
  out << csv_row("m_baseline_deg", deg_array(r.baseline.mean));
  out << csv_row("sd_kinematic_deg", deg_array(r.kinematic.sd));
  out << csv_row("sd_baseline_deg", deg_array(r.baseline.sd));
  out << csv_row("t", {r.tests[0].t, r.tests[1].t, r.tests[2].t, r.tests[3].t});
  out << csv_row("df",
                 {static_cast<double>(r.tests[0].df), static_cast<double>(r.tests[1].df),
                  static_cast<double>(r.tests[2].df), static_cast<double>(r.tests[3].df)});
  out << csv_row("p", {r.tests[0].p, r.tests[1].p, r.tests[2].p, r.tests[3].p});
  return out.str();
}

Json stats_to_json(const EstimatorStats& s) {
  Json j = Json::object();
  j["mean_deg"] = deg_array(s.mean);
  j["sd_deg"] = deg_array(s.sd);
  Json per = Json::array();
  for (const MetricColumns& row : s.per_participant) {
    per.push_back(deg_array(row));
  }
  j["per_participant_deg"] = per;
  return j;
}

std::string emit_structured(const MetricsReport& r) {
  Json doc = Json::object();
  doc["participants"] = r.participants;
  doc["metrics"] = Json::array({"phi_bentjoint", "phi_mcp", "phi_pip", "phi_dip"});
  doc["kinematic"] = stats_to_json(r.kinematic);
  doc["baseline"] = stats_to_json(r.baseline);
  Json tests = Json::array();
  for (const TTestResult& t : r.tests) {
    tests.push_back(Json{{"t", t.t}, {"df", t.df}, {"p", t.p}});
  }
  doc["tests"] = tests;
  return doc.dump(2) + "\n";
}

}  // namespace

std::string emit_report(const MetricsReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::table_text:
      return emit_table(report);
    case ReportFormat::csv:
      return emit_csv(report);
    case ReportFormat::structured:
      return emit_structured(report);
  }
  throw ValidationError("unknown report format");
}

NoiseConfig parse_noise_config(const std::string& text) {
  Json doc = parse_json(text, "noise config");
  require_object(doc, "noise config");
  reject_unknown_fields(
      doc, {"adc_bits", "sensor_noise_sd", "calibration_offset", "slip", "rng_seed"},
      "noise config");
  NoiseConfig noise;
  if (doc.contains("adc_bits")) {
    noise.adc_bits = static_cast<int>(get_number(doc, "adc_bits", "noise config"));
  }
  if (doc.contains("sensor_noise_sd")) {
    noise.sensor_noise_sd = get_number(doc, "sensor_noise_sd", "noise config");
  }
  if (doc.contains("calibration_offset")) {
    const Json& off = doc.at("calibration_offset");
    require_object(off, "noise config calibration_offset");
    for (const auto& [channel, value] : off.items()) {
      if (!value.is_number()) {
        throw ParseError("noise config calibration_offset: values must be numbers");
      }
      noise.calibration_offset[channel] = value.get<double>();
    }
  }
  if (doc.contains("slip")) {
    noise.slip = transform_from_json(doc.at("slip"), "noise config slip");
  }
  if (doc.contains("rng_seed")) {
    noise.rng_seed = static_cast<std::uint64_t>(get_number(doc, "rng_seed", "noise config"));
  }
  validate_noise(noise);
  return noise;
}

ProtocolConfig parse_protocol_config(const std::string& text) {
  Json doc = parse_json(text, "protocol config");
  require_object(doc, "protocol config");
  reject_unknown_fields(doc,
                        {"participants", "targets_deg", "joints", "blocks", "reps_per_block",
                         "seed", "noise", "coupling", "jitter_sd_deg", "rate_hz", "duration_s",
                         "hand_length_range_m"},
                        "protocol config");
  ProtocolConfig cfg;
  if (doc.contains("participants")) {
    cfg.participants = static_cast<int>(get_number(doc, "participants", "protocol config"));
  }
  if (doc.contains("targets_deg")) {
    if (!doc.at("targets_deg").is_array()) {
      throw ParseError("protocol config: targets_deg must be an array");
    }
    cfg.targets_deg.clear();
    for (const Json& t : doc.at("targets_deg")) {
      if (!t.is_number()) {
        throw ParseError("protocol config: targets_deg entries must be numbers");
      }
      cfg.targets_deg.push_back(t.get<double>());
    }
  }
  if (doc.contains("joints")) {
    if (!doc.at("joints").is_array()) {
      throw ParseError("protocol config: joints must be an array");
    }
    cfg.joints.clear();
    for (const Json& j : doc.at("joints")) {
      if (!j.is_string()) {
        throw ParseError("protocol config: joints entries must be strings");
      }
      cfg.joints.push_back(finger_joint_from_string(j.get<std::string>()));
    }
  }
  if (doc.contains("blocks")) {
    cfg.blocks = static_cast<int>(get_number(doc, "blocks", "protocol config"));
  }
  if (doc.contains("reps_per_block")) {
    cfg.reps_per_block = static_cast<int>(get_number(doc, "reps_per_block", "protocol config"));
  }
  if (doc.contains("seed")) {
    cfg.seed = static_cast<std::uint64_t>(get_number(doc, "seed", "protocol config"));
    cfg.has_seed = true;
  }
  if (doc.contains("noise")) {
    cfg.noise = parse_noise_config(doc.at("noise").dump());
  }
  if (doc.contains("coupling")) {
    const Json& c = doc.at("coupling");
    require_object(c, "protocol config coupling");
    reject_unknown_fields(c, {"grasp_deg"}, "protocol config coupling");
    if (c.contains("grasp_deg")) {
      if (!c.at("grasp_deg").is_array() || c.at("grasp_deg").size() != 3) {
        throw ParseError("protocol config coupling: grasp_deg must be [mcp, pip, dip]");
      }
      cfg.coupling.grasp_endpoint =
          JointTriple{c.at("grasp_deg")[0].get<double>() * kDegToRad,
                      c.at("grasp_deg")[1].get<double>() * kDegToRad,
                      c.at("grasp_deg")[2].get<double>() * kDegToRad};
    }
  }
  if (doc.contains("jitter_sd_deg")) {
    cfg.jitter_sd_deg = get_number(doc, "jitter_sd_deg", "protocol config");
  }
  if (doc.contains("rate_hz")) {
    cfg.rate_hz = get_number(doc, "rate_hz", "protocol config");
  }
  if (doc.contains("duration_s")) {
    cfg.duration_s = get_number(doc, "duration_s", "protocol config");
  }
  if (doc.contains("hand_length_range_m")) {
    const Json& r = doc.at("hand_length_range_m");
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
      throw ParseError("protocol config: hand_length_range_m must be [min, max]");
    }
    cfg.hand_length_min_m = r[0].get<double>();
    cfg.hand_length_max_m = r[1].get<double>();
  }
  return cfg;
}

}  // namespace handkin
