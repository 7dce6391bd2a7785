#pragma once

namespace hydap {

// Standard normal CDF.
double normal_cdf(double x);

// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Quantile of the Beta(a, b) distribution.
double beta_quantile(double a, double b, double u);

}  // namespace hydap
