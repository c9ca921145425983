#include <doctest.h>

#include <cmath>

#include "handkin/errors.hpp"
#include "handkin/ik.hpp"
#include "handkin/kinematics.hpp"
#include "handkin/models.hpp"
#include "handkin/rng.hpp"
#include "oracles.hpp"

using namespace handkin;

namespace {

KinematicModel planar_2r(double l1 = 1.0, double l2 = 1.0) {
  KinematicModel m;
  m.name = "planar_2r";
  m.root_link = "base";
  JointSpec j1;
  j1.name = "q1";
  j1.kind = JointKind::revolute;
  j1.parent_link = "base";
  j1.child_link = "link1";
  j1.axis = Vec3::UnitZ();
  j1.limits = {-EIGEN_PI, EIGEN_PI};
  JointSpec j2 = j1;
  j2.name = "q2";
  j2.parent_link = "link1";
  j2.child_link = "link2";
  j2.origin = Transform::from_translation(Vec3(l1, 0, 0));
  JointSpec tip;
  tip.name = "tip_joint";
  tip.kind = JointKind::fixed;
  tip.parent_link = "link2";
  tip.child_link = "armtip";
  tip.origin = Transform::from_translation(Vec3(l2, 0, 0));
  m.joints = {j1, j2, tip};
  m.end_effectors = {"armtip"};
  validate_model(m);
  return m;
}

}  // namespace

TEST_CASE("target at the seed pose converges without iterating") {
  const KinematicModel hand = build_hand_model(default_hand_dimensions());
  Rng rng(51);
  const JointStateMap seed = test::random_config(rng, hand);
  const Transform target = forward_kinematics(hand, seed, "indextip");
  const IkResult res = solve_ik(hand, "indextip", target, seed);
  CHECK(res.converged);
  CHECK(res.iterations_used <= 1);
  for (const auto& [name, value] : res.joints) {
    CHECK(value == doctest::Approx(seed.at(name)).epsilon(1e-12));
  }
}

TEST_CASE("planar 2R reaches (1,1) with matching orientation at (0, pi/2)") {
  const KinematicModel m = planar_2r();
  Transform target = Transform::from_axis_angle(Vec3::UnitZ(), EIGEN_PI / 2.0);
  target.translation = Vec3(1, 1, 0);
  const IkResult res = solve_ik(m, "armtip", target, {{"q1", 0.0}, {"q2", 0.0}});
  CHECK(res.converged);
  CHECK(res.joints.at("q1") == doctest::Approx(0.0).epsilon(1e-3));
  CHECK(std::abs(res.joints.at("q1")) < 1e-3);
  CHECK(std::abs(res.joints.at("q2") - EIGEN_PI / 2.0) < 1e-3);
}

TEST_CASE("unreachable target returns the stretched-out approximation") {
  const KinematicModel m = planar_2r();
  Transform target;
  target.translation = Vec3(2.1, 0, 0);  // 0.1 m beyond the reachable disc
  IkConfig cfg;
  cfg.max_iterations = 400;
  const IkResult res = solve_ik(m, "armtip", target, {{"q1", 0.0}, {"q2", 0.0}}, cfg);
  CHECK_FALSE(res.converged);
  CHECK(res.position_residual == doctest::Approx(0.1).epsilon(0.05));
  CHECK(std::abs(res.joints.at("q1")) < 0.05);
  CHECK(std::abs(res.joints.at("q2")) < 0.05);
}

TEST_CASE("returned joints always respect the limits exactly") {
  const KinematicModel hand = build_hand_model(default_hand_dimensions());
  Rng rng(52);
  for (int trial = 0; trial < 50; ++trial) {
    // random target, often unreachable
    Transform target = test::random_transform(rng, 0.15);
    JointStateMap seed;
    for (const std::string& name : chain_joint_names(hand, "middletip")) {
      seed[name] = 0.0;
    }
    IkConfig cfg;
    cfg.max_iterations = 40;
    const IkResult res = solve_ik(hand, "middletip", target, seed, cfg);
    CHECK(within_limits(hand, res.joints));
  }
}

TEST_CASE("best-so-far residual is non-increasing in the iteration budget") {
  const KinematicModel hand = build_hand_model(default_hand_dimensions());
  Transform target;
  target.translation = Vec3(0.05, 0.04, -0.05);
  target.rotation = Quat(Eigen::AngleAxisd(1.2, Vec3::UnitY()));

  JointStateMap seed;
  for (const std::string& name : chain_joint_names(hand, "indextip")) {
    seed[name] = 0.0;
  }
  double prev = std::numeric_limits<double>::infinity();
  for (int budget = 1; budget <= 30; ++budget) {
    IkConfig cfg;
    cfg.max_iterations = budget;
    cfg.position_tolerance = 1e-12;  // force the full budget
    cfg.orientation_tolerance = 1e-12;
    const IkResult res = solve_ik(hand, "indextip", target, seed, cfg);
    const double weighted = std::sqrt(res.position_residual * res.position_residual +
                                      cfg.orientation_weight * cfg.orientation_weight *
                                          res.orientation_residual * res.orientation_residual);
    CHECK(weighted <= prev + 1e-12);
    prev = weighted;
  }
}

TEST_CASE("config and input validation") {
  const KinematicModel m = planar_2r();
  IkConfig bad;
  bad.max_iterations = 0;
  CHECK_THROWS_AS(static_cast<void>(solve_ik(m, "armtip", {}, {{"q1", 0.0}, {"q2", 0.0}}, bad)),
                  ValidationError);
  bad = IkConfig{};
  bad.damping_lambda = 0.0;
  CHECK_THROWS_AS(static_cast<void>(solve_ik(m, "armtip", {}, {{"q1", 0.0}, {"q2", 0.0}}, bad)),
                  ValidationError);
  CHECK_THROWS_AS(static_cast<void>(solve_ik(m, "nope", {}, {})), DataError);
  CHECK_THROWS_WITH_AS(static_cast<void>(solve_ik(m, "armtip", {}, {{"q1", 0.0}})),
                       doctest::Contains("seed missing"), DataError);
}
