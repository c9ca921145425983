#include <doctest.h>

#include "handkin/rng.hpp"
#include "handkin/transform.hpp"
#include "oracles.hpp"

using namespace handkin;

TEST_CASE("compose matches homogeneous matrix product") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const Transform a = test::random_transform(rng);
    const Transform b = test::random_transform(rng);
    const Transform c = compose(a, b);
    const Mat4 m = to_matrix(a) * to_matrix(b);
    CHECK((to_matrix(c) - m).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("compose with inverse is the identity within 1e-9") {
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const Transform t = test::random_transform(rng);
    const Transform id = compose(t, invert(t));
    CHECK(id.translation.norm() < 1e-9);
    CHECK(rotation_distance(id.rotation, Quat::Identity()) < 1e-9);
  }
}

TEST_CASE("quaternion norm stays within 1e-9 of 1 after long composition chains") {
  Rng rng(13);
  Transform acc = Transform::identity();
  for (int i = 0; i < 10000; ++i) {
    acc = compose(acc, test::random_transform(rng));
    CHECK(std::abs(acc.rotation.norm() - 1.0) < 1e-9);
  }
}

TEST_CASE("apply agrees with the 4x4 matrix action") {
  Rng rng(14);
  for (int i = 0; i < 100; ++i) {
    const Transform t = test::random_transform(rng);
    const Vec3 p = test::random_unit_vec(rng) * rng.uniform(0.0, 2.0);
    const Eigen::Vector4d ph(p.x(), p.y(), p.z(), 1.0);
    const Eigen::Vector4d q = to_matrix(t) * ph;
    CHECK((apply(t, p) - q.head<3>()).norm() < 1e-12);
  }
}

TEST_CASE("rpy round trip") {
  Rng rng(15);
  for (int i = 0; i < 500; ++i) {
    const Quat q = test::random_quat(rng);
    const Vec3 rpy = to_rpy(q);
    const Transform t = Transform::from_rpy(Vec3::Zero(), rpy);
    CHECK(rotation_distance(t.rotation, q) < 1e-9);
  }
}

TEST_CASE("axis-angle constructor normalizes and rotates as expected") {
  const Transform t = Transform::from_axis_angle(Vec3(0, 0, 2), EIGEN_PI / 2.0);
  const Vec3 p = apply(t, Vec3(1, 0, 0));
  CHECK((p - Vec3(0, 1, 0)).norm() < 1e-12);
}

TEST_CASE("rotation_vector inverts AngleAxis") {
  Rng rng(16);
  for (int i = 0; i < 200; ++i) {
    const Quat q = test::random_quat(rng);
    const Vec3 w = rotation_vector(q);
    const Quat back(Eigen::AngleAxisd(w.norm(), w.norm() > 0 ? Vec3(w.normalized()) : Vec3::UnitX()));
    CHECK(rotation_distance(q, back) < 1e-9);
  }
}
