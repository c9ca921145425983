#pragma once

#include <span>

namespace handkin {

double mean(std::span<const double> v);

/// Sample standard deviation (n-1 denominator).
double sample_sd(std::span<const double> v);

/// I_x(a, b) via the Lentz continued fraction, accurate to ~1e-14.
double regularized_incomplete_beta(double x, double a, double b);

/// Two-sided tail probability of Student's t distribution,
/// p = I_{df/(t^2+df)}(df/2, 1/2).
double student_t_two_sided_p(double t, double df);

}  // namespace handkin
