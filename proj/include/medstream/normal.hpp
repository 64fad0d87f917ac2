#ifndef MEDSTREAM_NORMAL_HPP
#define MEDSTREAM_NORMAL_HPP

namespace medstream {

// Standard normal CDF, evaluated through erfc so the far tails keep full
// relative accuracy (absolute error below 1e-15 everywhere).
double normal_cdf(double x);

// Two-sided tail probability 2*(1 - Phi(|t|)) without the cancellation the
// literal formula suffers for large |t|.
double normal_two_sided_p(double t);

// Inverse of the standard normal CDF.
// Algorithm AS241 (Wichura 1988), accurate to about 1 part in 1e16.
double normal_quantile(double p);

}  // namespace medstream

#endif  // MEDSTREAM_NORMAL_HPP
