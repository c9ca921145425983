#include <doctest.h>

#include "handkin/errors.hpp"
#include "handkin/kinematics.hpp"
#include "handkin/models.hpp"
#include "handkin/rng.hpp"
#include "oracles.hpp"

using namespace handkin;

namespace {

KinematicModel single_revolute_with_tip() {
  KinematicModel m;
  m.name = "one_r";
  m.root_link = "base";
  JointSpec j;
  j.name = "j0";
  j.kind = JointKind::revolute;
  j.parent_link = "base";
  j.child_link = "arm";
  j.origin = Transform::from_translation(Vec3(1, 0, 0));
  j.axis = Vec3::UnitZ();
  j.limits = {-3.14, 3.14};
  JointSpec tip;
  tip.name = "tip_joint";
  tip.kind = JointKind::fixed;
  tip.parent_link = "arm";
  tip.child_link = "armtip";
  tip.origin = Transform::from_translation(Vec3(1, 0, 0));
  m.joints = {j, tip};
  m.end_effectors = {"armtip"};
  validate_model(m);
  return m;
}

}  // namespace

TEST_CASE("zero configuration multiplies only the origins") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const KinematicModel m = test::random_chain(rng);
    JointStateMap q;
    for (const JointSpec& j : m.joints) {
      if (j.kind == JointKind::revolute) {
        q[j.name] = 0.0;
      }
    }
    Transform expect = Transform::identity();
    for (const JointSpec& j : m.joints) {
      expect = compose(expect, j.origin);
    }
    const Transform got = forward_kinematics(m, q, test::last_link(m));
    CHECK((got.translation - expect.translation).norm() < 1e-12);
    CHECK(rotation_distance(got.rotation, expect.rotation) < 1e-12);
  }
}

TEST_CASE("single revolute about z with tip offset reaches (1,1,0) at q = pi/2") {
  const KinematicModel m = single_revolute_with_tip();
  const Transform tip = forward_kinematics(m, {{"j0", EIGEN_PI / 2.0}}, "armtip");
  CHECK((tip.translation - Vec3(1, 1, 0)).norm() < 1e-12);
}

TEST_CASE("random chains match the brute-force homogeneous product") {
  Rng rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const KinematicModel m = test::random_chain(rng, 6, 6);
    const JointStateMap q = test::random_config(rng, m);
    const std::string target = test::last_link(m);
    const Transform got = forward_kinematics(m, q, target);
    const Mat4 expect = test::brute_force_fk(m, q, target);
    CHECK((got.translation - expect.topRightCorner<3, 1>()).norm() < 1e-9);
    CHECK(test::rotation_angle_between(got.rotation.toRotationMatrix(),
                                       expect.topLeftCorner<3, 3>()) < 1e-9);
  }
}

TEST_CASE("all_tip_poses enumerates end effectors and matches per-link FK") {
  const KinematicModel hand = build_hand_model(default_hand_dimensions());
  Rng rng(33);
  const JointStateMap q = test::random_config(rng, hand);

  const auto tips = all_tip_poses(hand, q);
  REQUIRE(tips.size() == 4);
  CHECK(tips.count("indextip") == 1);
  CHECK(tips.count("middletip") == 1);
  CHECK(tips.count("ringtip") == 1);
  CHECK(tips.count("pinkytip") == 1);

  const auto again = all_tip_poses(hand, q);
  for (const auto& [name, pose] : tips) {
    const Transform direct = forward_kinematics(hand, q, name);
    CHECK((pose.translation - direct.translation).norm() == 0.0);
    CHECK((again.at(name).translation - pose.translation).norm() == 0.0);
    CHECK(rotation_distance(pose.rotation, direct.rotation) == 0.0);
  }
}

TEST_CASE("glove model tips match per-finger FK under a recorded configuration") {
  const KinematicModel glove = build_glove_model(default_glove_geometry(default_hand_dimensions()));
  JointStateMap q;
  for (const std::string& name : glove.revolute_joint_names()) {
    q[name] = 0.1;
  }
  const auto tips = all_tip_poses(glove, q);
  REQUIRE(tips.size() == 4);
  for (const auto& [name, pose] : tips) {
    const Transform direct = forward_kinematics(glove, q, name);
    CHECK((pose.translation - direct.translation).norm() < 1e-15);
  }
}

TEST_CASE("chain returns joints in parent-to-child order") {
  Rng rng(34);
  const KinematicModel m = test::random_chain(rng, 3, 3);
  const auto joints = chain(m, "base", test::last_link(m));
  REQUIRE(joints.size() == 3);
  CHECK(joints[0].name == "j0");
  CHECK(joints[1].name == "j1");
  CHECK(joints[2].name == "j2");

  CHECK(chain(m, "l1", "l1").empty());
  CHECK_THROWS_AS(static_cast<void>(chain(m, "nope", "l1")), DataError);
  CHECK_THROWS_AS(static_cast<void>(chain(m, "l1", "l0")), DataError);
}

TEST_CASE("FK is invariant under splitting a fixed joint in two") {
  Rng rng(35);
  for (int trial = 0; trial < 50; ++trial) {
    KinematicModel m = test::random_chain(rng, 2, 6);
    std::size_t fixed_idx = m.joints.size();
    for (std::size_t i = 0; i < m.joints.size(); ++i) {
      if (m.joints[i].kind == JointKind::fixed) {
        fixed_idx = i;
        break;
      }
    }
    if (fixed_idx == m.joints.size()) {
      continue;
    }
    const JointStateMap q = test::random_config(rng, m);
    const std::string target = test::last_link(m);
    const Transform before = forward_kinematics(m, q, target);

    // split origin into two random halves that compose to the original
    const Transform half = test::random_transform(rng);
    KinematicModel split = m;
    JointSpec& original = split.joints[fixed_idx];
    const Transform rest = compose(invert(half), original.origin);
    JointSpec inserted;
    inserted.name = original.name + "_a";
    inserted.kind = JointKind::fixed;
    inserted.parent_link = original.parent_link;
    inserted.child_link = original.parent_link + "_mid";
    inserted.origin = half;
    original.parent_link = inserted.child_link;
    original.origin = rest;
    split.joints.insert(split.joints.begin() + static_cast<std::ptrdiff_t>(fixed_idx), inserted);
    validate_model(split);

    const Transform after = forward_kinematics(split, q, target);
    CHECK((after.translation - before.translation).norm() < 1e-9);
    CHECK(rotation_distance(after.rotation, before.rotation) < 1e-9);
  }
}

TEST_CASE("FK errors: unknown link and missing joint value") {
  const KinematicModel m = single_revolute_with_tip();
  CHECK_THROWS_WITH_AS(static_cast<void>(forward_kinematics(m, {}, "nope")),
                       doctest::Contains("unknown link"), DataError);
  CHECK_THROWS_WITH_AS(static_cast<void>(forward_kinematics(m, {}, "armtip")),
                       doctest::Contains("missing joint value"), DataError);
}
