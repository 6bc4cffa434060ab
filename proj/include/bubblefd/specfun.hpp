#pragma once

namespace bubblefd {

// Regularized lower incomplete gamma function P(nu, z) = gamma(nu, z) / Gamma(nu).
// nu > 0, z >= 0; absolute accuracy better than 1e-12.
double reg_lower_gamma(double nu, double z);

// Standard normal distribution function Phi(x).
double norm_cdf(double x);

}  // namespace bubblefd
