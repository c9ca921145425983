#include "handkin/ik.hpp"

#include <algorithm>
#include <cmath>

#include "handkin/errors.hpp"

namespace handkin {

namespace {

void check_config(const IkConfig& cfg) {
  if (cfg.max_iterations < 1) {
    throw ValidationError("ik config: max_iterations must be >= 1");
  }
  if (cfg.position_tolerance <= 0.0 || cfg.orientation_tolerance <= 0.0 ||
      cfg.damping_lambda <= 0.0 || cfg.max_step <= 0.0 || cfg.orientation_weight <= 0.0) {
    throw ValidationError("ik config: all parameters must be strictly positive");
  }
}

struct TaskError {
  Eigen::Matrix<double, 6, 1> weighted;  // angular rows scaled by orientation_weight
  double position = 0.0;
  double orientation = 0.0;
};

TaskError task_error(const Transform& current, const Transform& target, double ori_weight) {
  TaskError e;
  const Vec3 p_err = target.translation - current.translation;
  const Vec3 w_err = rotation_vector((target.rotation * current.rotation.conjugate()).normalized());
  e.weighted.head<3>() = p_err;
  e.weighted.tail<3>() = ori_weight * w_err;
  e.position = p_err.norm();
  e.orientation = w_err.norm();
  return e;
}

}  // namespace

IkResult solve_ik(const KinematicModel& model, const std::string& tip_link,
                  const Transform& target, const JointStateMap& seed, const IkConfig& cfg) {
  check_config(cfg);
  const std::vector<std::string> joint_names = chain_joint_names(model, tip_link);
  const auto n = static_cast<Eigen::Index>(joint_names.size());

  Eigen::VectorXd lower(n), upper(n), q(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const JointSpec& spec = model.joint(joint_names[static_cast<std::size_t>(i)]);
    lower[i] = spec.limits.lower;
    upper[i] = spec.limits.upper;
    auto it = seed.find(spec.name);
    if (it == seed.end()) {
      throw DataError("ik seed missing chain joint '" + spec.name + "'");
    }
    q[i] = std::clamp(it->second, lower[i], upper[i]);
  }

  auto to_map = [&](const Eigen::VectorXd& v) {
    JointStateMap m;
    for (Eigen::Index i = 0; i < n; ++i) {
      m[joint_names[static_cast<std::size_t>(i)]] = v[i];
    }
    return m;
  };

  IkResult result;
  result.joints = to_map(q);

  JointStateMap q_map = result.joints;
  TaskError err = task_error(forward_kinematics(model, q_map, tip_link), target,
                             cfg.orientation_weight);
  double best_norm = err.weighted.norm();
  Eigen::VectorXd best_q = q;
  result.position_residual = err.position;
  result.orientation_residual = err.orientation;

  auto converged = [&](const TaskError& e) {
    return e.position <= cfg.position_tolerance && e.orientation <= cfg.orientation_tolerance;
  };

  if (converged(err)) {
    result.converged = true;
    return result;
  }

  // iterations without a new best iterate before giving up; unreachable or
  // noise-floored targets plateau long before max_iterations
  constexpr int kStallWindow = 25;

  const double lambda_sq = cfg.damping_lambda * cfg.damping_lambda;
  int best_iter = 0;
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    Eigen::MatrixXd jac = geometric_jacobian(model, q_map, tip_link);
    jac.bottomRows(3) *= cfg.orientation_weight;

    Eigen::Matrix<double, 6, 6> jjt = jac * jac.transpose();
    jjt.diagonal().array() += lambda_sq;
    Eigen::VectorXd dq = jac.transpose() * jjt.ldlt().solve(err.weighted);

    dq = dq.cwiseMax(-cfg.max_step).cwiseMin(cfg.max_step);
    q = (q + dq).cwiseMax(lower).cwiseMin(upper);
    q_map = to_map(q);

    err = task_error(forward_kinematics(model, q_map, tip_link), target, cfg.orientation_weight);
    result.iterations_used = iter;
    const double norm = err.weighted.norm();
    if (norm < best_norm) {
      best_norm = norm;
      best_q = q;
      best_iter = iter;
      result.position_residual = err.position;
      result.orientation_residual = err.orientation;
    }
    if (converged(err)) {
      result.joints = to_map(q);
      result.position_residual = err.position;
      result.orientation_residual = err.orientation;
      result.converged = true;
      return result;
    }
    if (iter - best_iter >= kStallWindow) {
      break;
    }
  }

  result.joints = to_map(best_q);
  return result;
}

}  // namespace handkin
