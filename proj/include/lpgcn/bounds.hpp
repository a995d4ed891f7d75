#pragma once

#include <cstddef>

namespace lpgcn {

// Inputs of the stability and generalization bound calculators.
struct BoundInputs {
  double a_l = 1.0;
  double a_sigma = 1.0;
  double lambda_g_max = 1.0;  // largest absolute filter eigenvalue
  double g_e = 1.0;           // largest aggregated-feature row norm
  double eta = 0.1;
  std::size_t n = 1;  // training-set size
  std::size_t T = 1;  // iteration count
  double p = 2.0;
  double lambda = 1e-3;
  double lambda_t = 1e-4;
  double B = 1.0;
  double delta = 0.05;  // confidence level for the generalization bound

  void validate() const;
};

// (B/lambda)^(1/p): radius of the ball containing every global minimizer.
double minimizer_radius(double B, double lambda, double p);

// 28 / (p (p-1) lambda_t) * (B/lambda)^((3-p)/p).
double c_p_lambda(double p, double lambda, double lambda_t, double B);

// The bound grows exponentially in T at realistic settings; the value is
// reported saturated (infinity) rather than silently wrong, and log_value
// stays finite for ordering comparisons.
struct BetaBound {
  double value = 0.0;
  double log_value = 0.0;
  bool saturated = false;
};

// Uniform-stability bound of the trained model:
// a_l^2 a_sigma^2 lambda_G_max * (eta C g_e / n) * sum_{t=1}^T q^(t-1)
// with q = C (1 + (a_sigma^2 + a_l) eta g_e^2). Accumulated in log space
// when q exceeds 1.
BetaBound stability_beta(const BoundInputs& inputs);

// High-probability generalization bound from a stability level:
// 2 beta + (4 n beta + B) sqrt(log(1/delta) / (2n)).
double generalization_bound(double beta_n, double B, std::size_t n, double delta);

// One-sided test of the bounded-domain strong convexity of |x|^p:
// |a|^p + |b|^p - 2|(a+b)/2|^p - (1/4)(b-a)^2 p(p-1) M^(p-2) with
// M = max(|a|,|b|). Non-negative up to rounding, since p-2 <= 0 makes
// M^(p-2) the smallest value of |c|^(p-2) on the bracket.
double check_strong_convexity(double a, double b, double p);

}  // namespace lpgcn
