#include <doctest.h>

#include <cmath>

#include "handkin/errors.hpp"
#include "handkin/eval.hpp"
#include "handkin/rng.hpp"
#include "handkin/stats.hpp"
#include "oracles.hpp"

using namespace handkin;

TEST_CASE("paired t on d = (1,2,3) gives t = 3.4641, df = 2") {
  const std::vector<double> a = {2.0, 4.0, 6.0};
  const std::vector<double> b = {1.0, 2.0, 3.0};  // d = (1, 2, 3)
  const TTestResult r = paired_t_test(a, b);
  CHECK(r.df == 2);
  CHECK(std::abs(r.t - 3.4641) < 5e-5);
  // closed form for df = 2: p = 1 - t/sqrt(t^2 + 2) gives the analytic answer
  const double analytic = 1.0 - r.t / std::sqrt(r.t * r.t + 2.0);
  CHECK(r.p == doctest::Approx(analytic).epsilon(1e-10));
}

TEST_CASE("identical samples are a degenerate pairing") {
  const std::vector<double> a = {1.0, 2.0, 3.0};
  CHECK_THROWS_WITH_AS(static_cast<void>(paired_t_test(a, a)), doctest::Contains("degenerate"),
                       DataError);
}

TEST_CASE("length mismatch and short samples are errors") {
  const std::vector<double> a = {1.0, 2.0};
  const std::vector<double> b = {1.0};
  CHECK_THROWS_AS(static_cast<void>(paired_t_test(a, b)), DataError);
  CHECK_THROWS_AS(static_cast<void>(paired_t_test(b, b)), DataError);
}

TEST_CASE("p matches the quadrature oracle within 1e-6") {
  const double cases[][2] = {{3.4641, 2.0}, {1.0, 11.0}, {2.2, 11.0},
                             {0.5, 5.0},    {4.9, 11.0}, {0.05, 3.0}};
  for (const auto& c : cases) {
    const double p = student_t_two_sided_p(c[0], c[1]);
    const double oracle = test::quadrature_t_two_sided_p(c[0], c[1]);
    CHECK(std::abs(p - oracle) < 1e-6);
  }
}

TEST_CASE("n = 12 synthetic samples match the quadrature oracle") {
  Rng rng(101);
  std::vector<double> a(12), b(12);
  for (int i = 0; i < 12; ++i) {
    a[static_cast<std::size_t>(i)] = rng.normal(0.3, 1.0);
    b[static_cast<std::size_t>(i)] = rng.normal(0.0, 1.0);
  }
  const TTestResult r = paired_t_test(a, b);
  CHECK(r.df == 11);
  CHECK(std::abs(r.p - test::quadrature_t_two_sided_p(r.t, 11.0)) < 1e-6);
}

TEST_CASE("t is antisymmetric under swapping the samples; p is invariant") {
  Rng rng(102);
  std::vector<double> a(8), b(8);
  for (int i = 0; i < 8; ++i) {
    a[static_cast<std::size_t>(i)] = rng.uniform(0.0, 2.0);
    b[static_cast<std::size_t>(i)] = rng.uniform(0.0, 2.0);
  }
  const TTestResult ab = paired_t_test(a, b);
  const TTestResult ba = paired_t_test(b, a);
  CHECK(ab.t == doctest::Approx(-ba.t).epsilon(1e-12));
  CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-12));
}

TEST_CASE("regularized incomplete beta: closed forms and symmetry") {
  // I_x(1, b) = 1 - (1-x)^b, I_x(a, 1) = x^a
  CHECK(regularized_incomplete_beta(1.0 / 7.0, 1.0, 0.5) ==
        doctest::Approx(1.0 - std::sqrt(6.0 / 7.0)).epsilon(1e-12));
  CHECK(regularized_incomplete_beta(0.3, 2.0, 1.0) == doctest::Approx(0.09).epsilon(1e-12));
  Rng rng(103);
  for (int i = 0; i < 100; ++i) {
    const double x = rng.uniform01();
    const double a = rng.uniform(0.3, 8.0);
    const double b = rng.uniform(0.3, 8.0);
    const double lhs = regularized_incomplete_beta(x, a, b);
    const double rhs = 1.0 - regularized_incomplete_beta(1.0 - x, b, a);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    CHECK(lhs >= 0.0);
    CHECK(lhs <= 1.0);
  }
}

TEST_CASE("two-sided p decreases as |t| grows") {
  double prev = 1.1;
  for (double t = 0.0; t < 6.0; t += 0.25) {
    const double p = student_t_two_sided_p(t, 11.0);
    CHECK(p < prev + 1e-15);
    prev = p;
  }
  CHECK(student_t_two_sided_p(0.0, 11.0) == doctest::Approx(1.0));
}

TEST_CASE("mean and sample_sd guard their inputs") {
  CHECK_THROWS_AS(static_cast<void>(mean({})), DataError);
  const std::vector<double> one = {1.0};
  CHECK_THROWS_AS(static_cast<void>(sample_sd(one)), DataError);
  const std::vector<double> v = {1.0, 2.0, 3.0};
  CHECK(mean(v) == doctest::Approx(2.0));
  CHECK(sample_sd(v) == doctest::Approx(1.0));
}
