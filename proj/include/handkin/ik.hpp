#pragma once

#include <string>

#include "handkin/kinematics.hpp"
#include "handkin/model.hpp"

namespace handkin {

/// Damped-least-squares solver settings. All fields strictly positive.
///
/// The default tolerances are deliberately tight: near a straight PIP the
/// joint-space observability of a finger chain degrades to second order, so
/// recovering joints to 1e-3 rad requires driving the task residual to the
/// 1e-8 m scale, and the damping must be small enough for the solver to keep
/// moving along that nearly-singular direction.
struct IkConfig {
  int max_iterations = 1000;
  double position_tolerance = 2e-9;     // m
  double orientation_tolerance = 1e-5;  // rad
  double damping_lambda = 1e-5;
  double max_step = 0.2;                // rad per joint per iteration
  double orientation_weight = 0.02;     // m per rad, scales the angular task rows
};

struct IkResult {
  JointStateMap joints;
  bool converged = false;
  double position_residual = 0.0;     // m
  double orientation_residual = 0.0;  // rad
  int iterations_used = 0;
};

/// Iterates dq = J^T (J J^T + lambda^2 I)^-1 e on the root->tip chain,
/// clamping each dq component to +-max_step and q to joint limits every
/// iteration. Keeps the best iterate seen; unreachable targets yield the
/// best approximation with converged=false, never an error.
/// Throws ValidationError on a bad config, DataError on unknown tip link
/// or a seed missing a chain joint.
IkResult solve_ik(const KinematicModel& model, const std::string& tip_link,
                  const Transform& target, const JointStateMap& seed,
                  const IkConfig& cfg = {});

}  // namespace handkin
