#include "handkin/stats.hpp"

#include <cmath>

#include "handkin/errors.hpp"

namespace handkin {

double mean(std::span<const double> v) {
  if (v.empty()) {
    throw DataError("mean of empty sample");
  }
  double sum = 0.0;
  for (double x : v) {
    sum += x;
  }
  return sum / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) {
    throw DataError("sample sd needs at least 2 values");
  }
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) {
    ss += (x - m) * (x - m);
  }
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

namespace {

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Lentz's algorithm for the incomplete-beta continued fraction.
double beta_continued_fraction(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-15;
  constexpr int max_terms = 200000;

  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < tiny) {
    d = tiny;
  }
  d = 1.0 / d;
  double result = d;
  for (int m = 1; m <= max_terms; ++m) {
    const double dm = static_cast<double>(m);
    // even step
    double numer = dm * (b - dm) * x / ((a + 2.0 * dm - 1.0) * (a + 2.0 * dm));
    d = 1.0 + numer * d;
    if (std::abs(d) < tiny) {
      d = tiny;
    }
    c = 1.0 + numer / c;
    if (std::abs(c) < tiny) {
      c = tiny;
    }
    d = 1.0 / d;
    result *= d * c;
    // odd step
    numer = -(a + dm) * (a + b + dm) * x / ((a + 2.0 * dm) * (a + 2.0 * dm + 1.0));
    d = 1.0 + numer * d;
    if (std::abs(d) < tiny) {
      d = tiny;
    }
    c = 1.0 + numer / c;
    if (std::abs(c) < tiny) {
      c = tiny;
    }
    d = 1.0 / d;
    const double delta = d * c;
    result *= delta;
    if (std::abs(delta - 1.0) < eps) {
      break;
    }
  }
  return result;
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0) || a <= 0.0 || b <= 0.0) {
    throw DataError("regularized_incomplete_beta: invalid arguments");
  }
  if (x == 0.0) {
    return 0.0;
  }
  if (x == 1.0) {
    return 1.0;
  }
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(x, a, b) / a;
  }
  return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(b, a)) *
                   beta_continued_fraction(1.0 - x, b, a) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (df <= 0.0) {
    throw DataError("student_t_two_sided_p: df must be positive");
  }
  if (!std::isfinite(t)) {
    return 0.0;
  }
  const double x = df / (t * t + df);
  return regularized_incomplete_beta(x, df / 2.0, 0.5);
}

}  // namespace handkin
