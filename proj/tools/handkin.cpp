#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "handkin/calibration.hpp"
#include "handkin/errors.hpp"
#include "handkin/eval.hpp"
#include "handkin/ik.hpp"
#include "handkin/json_util.hpp"
#include "handkin/kinematics.hpp"
#include "handkin/model_io.hpp"
#include "handkin/models.hpp"
#include "handkin/pipeline.hpp"

namespace {

using namespace handkin;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot read file '" + path + "'");
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write file '" + path + "'");
  }
  out << content;
}

// "--hand default" / "--glove default" use the built-in 17.2 cm hand and the
// glove fitted to it; anything else is a file path.
KinematicModel load_model_arg(const std::string& arg, bool glove) {
  if (arg == "default") {
    const HandDimensions dims = default_hand_dimensions();
    return glove ? build_glove_model(default_glove_geometry(dims)) : build_hand_model(dims);
  }
  return load_any_model(read_file(arg));
}

SensorCalibration load_calibration_arg(const std::string& arg, const KinematicModel& glove) {
  if (arg == "default") {
    return default_calibration(glove);
  }
  return parse_calibration(read_file(arg));
}

Alignment load_alignment_arg(const std::string& arg) {
  if (arg == "identity" || arg == "default") {
    return Alignment{Transform::identity()};
  }
  return parse_alignment(read_file(arg));
}

JointStateMap parse_posture(const std::string& text, const std::string& what) {
  Json doc = parse_json(text, what);
  require_object(doc, what);
  reject_unknown_fields(doc, {"joints"}, what);
  if (!doc.contains("joints") || !doc.at("joints").is_object()) {
    throw ParseError(what + ": missing 'joints' object");
  }
  JointStateMap q;
  for (const auto& [name, value] : doc.at("joints").items()) {
    if (!value.is_number()) {
      throw ParseError(what + ": joint '" + name + "' must be a number (radians)");
    }
    q[name] = value.get<double>();
  }
  return q;
}

IkConfig load_ik_config_arg(const std::string& arg) {
  if (arg.empty()) {
    return pipeline_ik_defaults();
  }
  return parse_ik_config(read_file(arg));
}

ReportFormat report_format(const std::string& name) {
  if (name == "table") {
    return ReportFormat::table_text;
  }
  if (name == "csv") {
    return ReportFormat::csv;
  }
  if (name == "json") {
    return ReportFormat::structured;
  }
  throw ParseError("unknown report format '" + name + "' (expected table, csv or json)");
}

int run(int argc, char** argv) {
  CLI::App app{"Haptic-glove hand posture estimation toolkit"};
  app.require_subcommand(1);

  // model
  auto* model_cmd = app.add_subcommand("model", "Model and config file tools");
  model_cmd->require_subcommand(1);

  auto* validate_cmd = model_cmd->add_subcommand("validate", "Validate a model or config file");
  std::string validate_path, validate_out;
  bool expand = false;
  validate_cmd->add_option("path", validate_path, "Model document or geometry/dimensions config")
      ->required();
  validate_cmd->add_flag("--expand", expand, "Emit the expanded model document");
  validate_cmd->add_option("-o,--out", validate_out, "Output path (default stdout)");
  validate_cmd->callback([&]() {
    const KinematicModel model = load_any_model(read_file(validate_path));
    if (expand) {
      write_output(validate_out, serialize_model(model));
    } else {
      std::cout << "ok: model '" << model.name << "' (" << model.joints.size() << " joints, "
                << model.end_effectors.size() << " end effectors)\n";
    }
  });

  auto* defaults_cmd = model_cmd->add_subcommand("defaults", "Emit a default config file");
  std::string defaults_kind, defaults_out;
  double hand_length = 0.172;
  defaults_cmd->add_option("--kind", defaults_kind, "hand | glove")->required();
  defaults_cmd->add_option("--hand-length", hand_length, "Hand length in meters (default 0.172)");
  defaults_cmd->add_option("-o,--out", defaults_out, "Output path (default stdout)");
  defaults_cmd->callback([&]() {
    const HandDimensions dims = default_hand_dimensions(hand_length);
    if (defaults_kind == "hand") {
      write_output(defaults_out, serialize_hand_dimensions(dims));
    } else if (defaults_kind == "glove") {
      write_output(defaults_out, serialize_glove_geometry(default_glove_geometry(dims)));
    } else {
      throw ParseError("--kind must be 'hand' or 'glove'");
    }
  });

  // fk
  auto* fk_cmd = app.add_subcommand("fk", "Forward kinematics of one link");
  std::string fk_model, fk_joints, fk_tip;
  fk_cmd->add_option("--model", fk_model, "Model document or config ('default' for built-in hand)")
      ->required();
  fk_cmd->add_option("--joints", fk_joints, "Posture file {\"joints\": {...}}")->required();
  fk_cmd->add_option("--tip", fk_tip, "Target link name")->required();
  fk_cmd->callback([&]() {
    const KinematicModel model = load_model_arg(fk_model, false);
    const JointStateMap q = parse_posture(read_file(fk_joints), "posture file");
    const Transform pose = forward_kinematics(model, q, fk_tip);
    std::cout << transform_to_json(pose).dump(2) << "\n";
  });

  // ik
  auto* ik_cmd = app.add_subcommand("ik", "Iterative IK for one chain");
  std::string ik_model, ik_tip, ik_target, ik_seed_path, ik_cfg_path;
  ik_cmd->add_option("--model", ik_model, "Model document or config")->required();
  ik_cmd->add_option("--tip", ik_tip, "End-effector link")->required();
  ik_cmd->add_option("--target", ik_target, "Target transform file {xyz, quat}")->required();
  ik_cmd->add_option("--seed-file", ik_seed_path, "Seed posture file (default all-zero)");
  ik_cmd->add_option("--ik-config", ik_cfg_path, "IK config file");
  ik_cmd->callback([&]() {
    const KinematicModel model = load_model_arg(ik_model, false);
    const Transform target = transform_from_json(
        parse_json(read_file(ik_target), "target transform"), "target transform");
    JointStateMap seed;
    if (!ik_seed_path.empty()) {
      seed = parse_posture(read_file(ik_seed_path), "seed file");
    }
    for (const std::string& name : chain_joint_names(model, ik_tip)) {
      seed.emplace(name, 0.0);
    }
    const IkResult res = solve_ik(model, ik_tip, target, seed, load_ik_config_arg(ik_cfg_path));
    Json out = Json::object();
    Json joints = Json::object();
    for (const auto& [name, value] : res.joints) {
      joints[name] = value;
    }
    out["joints"] = joints;
    out["converged"] = res.converged;
    out["position_residual"] = res.position_residual;
    out["orientation_residual"] = res.orientation_residual;
    out["iterations_used"] = res.iterations_used;
    std::cout << out.dump(2) << "\n";
  });

  // calibrate
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Calibration utilities");
  calibrate_cmd->require_subcommand(1);

  auto* align_cmd = calibrate_cmd->add_subcommand(
      "align", "Glove-to-hand alignment from one shared calibration pose");
  std::string align_glove_tip, align_hand_tip, align_out;
  align_cmd->add_option("--glove-tip", align_glove_tip, "Glove tip transform file")->required();
  align_cmd->add_option("--hand-tip", align_hand_tip, "Hand tip transform file")->required();
  align_cmd->add_option("-o,--out", align_out, "Output path (default stdout)");
  align_cmd->callback([&]() {
    const Transform glove_tip = transform_from_json(
        parse_json(read_file(align_glove_tip), "glove tip"), "glove tip");
    const Transform hand_tip =
        transform_from_json(parse_json(read_file(align_hand_tip), "hand tip"), "hand tip");
    write_output(align_out, serialize_alignment(align_spaces(glove_tip, hand_tip)));
  });

  auto* apply_cmd = calibrate_cmd->add_subcommand("apply", "Map a raw sensor stream to radians");
  std::string apply_calib, apply_frames, apply_out;
  apply_cmd->add_option("--calibration", apply_calib, "Calibration file")->required();
  apply_cmd->add_option("--frames", apply_frames, "Sensor stream file")->required();
  apply_cmd->add_option("-o,--out", apply_out, "Output path (default stdout)");
  apply_cmd->callback([&]() {
    const SensorCalibration calib = parse_calibration(read_file(apply_calib));
    const std::vector<SensorFrame> frames = read_sensor_stream(read_file(apply_frames));
    std::ostringstream out;
    out << "{\"format\":\"handkin/v1\"}\n";
    for (const SensorFrame& f : frames) {
      Json j = Json::object();
      j["t"] = f.timestamp;
      Json joints = Json::object();
      for (const auto& [name, value] : apply_calibration(f, calib)) {
        joints[name] = value;
      }
      j["joints"] = joints;
      out << j.dump() << "\n";
    }
    write_output(apply_out, out.str());
  });

  // estimate
  auto* estimate_cmd = app.add_subcommand("estimate", "Sensor stream -> hand joint stream");
  std::string est_frames, est_glove, est_hand, est_calib, est_alignment, est_cfg, est_out;
  estimate_cmd->add_option("--frames", est_frames, "Sensor stream file")->required();
  estimate_cmd->add_option("--glove", est_glove, "Glove model/config or 'default'")->required();
  estimate_cmd->add_option("--hand", est_hand, "Hand model/config or 'default'")->required();
  estimate_cmd->add_option("--calibration", est_calib, "Calibration file or 'default'")
      ->required();
  estimate_cmd->add_option("--alignment", est_alignment, "Alignment file or 'identity'")
      ->required();
  estimate_cmd->add_option("--ik-config", est_cfg, "IK config file");
  estimate_cmd->add_option("-o,--out", est_out, "Output path (default stdout)");
  estimate_cmd->callback([&]() {
    const KinematicModel glove = load_model_arg(est_glove, true);
    const KinematicModel hand = load_model_arg(est_hand, false);
    const SensorCalibration calib = load_calibration_arg(est_calib, glove);
    const Alignment alignment = load_alignment_arg(est_alignment);
    const std::vector<SensorFrame> frames = read_sensor_stream(read_file(est_frames));
    const std::vector<StreamOutput> outputs =
        process_stream(frames, calib, glove, alignment, hand, load_ik_config_arg(est_cfg));
    write_output(est_out, write_estimate_stream(outputs));
  });

  // simulate
  auto* simulate_cmd = app.add_subcommand("simulate", "Synthetic sensor frames");
  std::string sim_posture, sim_protocol, sim_glove = "default", sim_hand = "default";
  std::string sim_calib = "default", sim_alignment = "identity", sim_noise, sim_out;
  std::optional<std::uint64_t> sim_seed;
  simulate_cmd->add_option("--posture", sim_posture, "Posture file (single-frame mode)");
  simulate_cmd->add_option("--protocol", sim_protocol, "Protocol config (study-stream mode)");
  simulate_cmd->add_option("--glove", sim_glove, "Glove model/config or 'default'");
  simulate_cmd->add_option("--hand", sim_hand, "Hand model/config or 'default'");
  simulate_cmd->add_option("--calibration", sim_calib, "Calibration file or 'default'");
  simulate_cmd->add_option("--alignment", sim_alignment, "Alignment file or 'identity'");
  simulate_cmd->add_option("--noise", sim_noise, "Noise config file (default: no noise)");
  simulate_cmd->add_option("--seed", sim_seed, "RNG seed (required)");
  simulate_cmd->add_option("-o,--out", sim_out, "Output path (default stdout)");
  simulate_cmd->callback([&]() {
    if (!sim_seed.has_value()) {
      throw CLI::RequiredError("--seed");
    }
    if (sim_posture.empty() == sim_protocol.empty()) {
      throw CLI::RequiredError("exactly one of --posture / --protocol");
    }
    if (!sim_protocol.empty()) {
      ProtocolConfig cfg = parse_protocol_config(read_file(sim_protocol));
      cfg.seed = *sim_seed;
      cfg.has_seed = true;
      std::vector<std::string> log;
      const std::string text = write_protocol_frames(simulate_protocol_frames(cfg, &log));
      for (const std::string& line : log) {
        std::cerr << line << "\n";
      }
      write_output(sim_out, text);
      return;
    }
    const KinematicModel glove = load_model_arg(sim_glove, true);
    const KinematicModel hand = load_model_arg(sim_hand, false);
    const SensorCalibration calib = load_calibration_arg(sim_calib, glove);
    const Alignment alignment = load_alignment_arg(sim_alignment);
    NoiseConfig noise = sim_noise.empty() ? NoiseConfig::none()
                                          : parse_noise_config(read_file(sim_noise));
    noise.rng_seed = *sim_seed;
    const JointStateMap q = parse_posture(read_file(sim_posture), "posture file");
    const SensorFrame frame = simulate_glove(q, hand, glove, alignment, calib, noise);
    write_output(sim_out, write_sensor_stream({frame}));
  });

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Run the study protocol and report metrics");
  std::string eval_config, eval_format = "table", eval_out;
  std::optional<std::uint64_t> eval_seed;
  int jobs = 1;
  evaluate_cmd->add_option("--config", eval_config, "Protocol config file")->required();
  evaluate_cmd->add_option("--seed", eval_seed, "Override the config seed");
  evaluate_cmd->add_option("--format", eval_format, "table | csv | json");
  evaluate_cmd->add_option("--jobs", jobs, "Worker threads over participants (default 1)");
  evaluate_cmd->add_option("-o,--out", eval_out, "Output path (default stdout)");
  evaluate_cmd->callback([&]() {
    ProtocolConfig cfg = parse_protocol_config(read_file(eval_config));
    if (eval_seed.has_value()) {
      cfg.seed = *eval_seed;
      cfg.has_seed = true;
    }
    if (!cfg.has_seed) {
      throw CLI::RequiredError("--seed (or a 'seed' field in the config)");
    }
    const ReportFormat fmt = report_format(eval_format);
    const ProtocolRun protocol = run_protocol(cfg, {}, jobs);
    for (const std::string& line : protocol.log) {
      std::cerr << line << "\n";
    }
    write_output(eval_out, emit_report(compute_metrics(protocol.results), fmt));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // usage errors are exit code 1
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
