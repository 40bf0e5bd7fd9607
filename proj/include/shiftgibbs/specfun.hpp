#pragma once

namespace shiftgibbs {

// Distribution special functions not provided by the standard library.
// All take standardized arguments; scaling by mean/sigma is the caller's job.

double normal_cdf(double x);            // P(Z <= x), Z ~ N(0,1)
double normal_sf(double x);             // P(Z > x)
double normal_quantile(double p);       // inverse of normal_cdf, p in (0,1)

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double reg_inc_beta(double a, double b, double x);

// Two-sided tail P(|T| > z) of Student's t with nu > 0 degrees of freedom.
double student_t_tail(double nu, double z);

} // namespace shiftgibbs
