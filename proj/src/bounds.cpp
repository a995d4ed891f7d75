#include "lpgcn/bounds.hpp"

#include <cmath>
#include <limits>

#include "lpgcn/errors.hpp"

namespace lpgcn {

void BoundInputs::validate() const {
  if (!(a_l > 0.0 && a_sigma > 0.0)) throw InputError("bounds: constants must be positive");
  if (!(lambda_g_max > 0.0 && g_e > 0.0)) throw InputError("bounds: graph terms must be positive");
  if (!(eta > 0.0)) throw InputError("bounds: eta must be positive");
  if (n == 0 || T == 0) throw InputError("bounds: n and T must be positive");
  if (!(p > 1.0 && p <= 2.0)) throw InputError("p must lie in (1,2]");
  if (!(lambda > 0.0 && lambda_t > 0.0 && B > 0.0)) {
    throw InputError("bounds: lambda, lambda_t and B must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("bounds: delta must lie in (0,1)");
}

double minimizer_radius(double B, double lambda, double p) {
  if (!(B > 0.0 && lambda > 0.0)) throw InputError("minimizer_radius: B and lambda must be positive");
  if (!(p > 1.0 && p <= 2.0)) throw InputError("p must lie in (1,2]");
  return std::pow(B / lambda, 1.0 / p);
}

double c_p_lambda(double p, double lambda, double lambda_t, double B) {
  if (!(p > 1.0 && p <= 2.0)) throw InputError("p must lie in (1,2]");
  if (!(lambda > 0.0 && lambda_t > 0.0 && B > 0.0)) {
    throw InputError("c_p_lambda: lambda, lambda_t and B must be positive");
  }
  return 28.0 / (p * (p - 1.0) * lambda_t) * std::pow(B / lambda, (3.0 - p) / p);
}

BetaBound stability_beta(const BoundInputs& in) {
  in.validate();
  const double c = c_p_lambda(in.p, in.lambda, in.lambda_t, in.B);
  const double q = c * (1.0 + (in.a_sigma * in.a_sigma + in.a_l) * in.eta * in.g_e * in.g_e);
  const double log_prefactor = 2.0 * std::log(in.a_l) + 2.0 * std::log(in.a_sigma) +
                               std::log(in.lambda_g_max) + std::log(in.eta) +
                               std::log(c) + std::log(in.g_e) -
                               std::log(static_cast<double>(in.n));

  // log of sum_{t=1}^T q^(t-1)
  const auto T = static_cast<double>(in.T);
  double log_sum;
  if (std::abs(q - 1.0) < 1e-12) {
    log_sum = std::log(T);
  } else if (q < 1.0) {
    log_sum = std::log((1.0 - std::pow(q, T)) / (1.0 - q));
  } else {
    // (q^T - 1)/(q - 1) = q^(T-1) (1 - q^-T)/(1 - q^-1)
    const double lq = std::log(q);
    log_sum = (T - 1.0) * lq + std::log1p(-std::exp(-T * lq)) -
              std::log1p(-std::exp(-lq));
  }

  BetaBound out;
  out.log_value = log_prefactor + log_sum;
  out.value = std::exp(out.log_value);
  if (!std::isfinite(out.value)) {
    out.value = std::numeric_limits<double>::infinity();
    out.saturated = true;
  }
  return out;
}

double generalization_bound(double beta_n, double B, std::size_t n, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("bounds: delta must lie in (0,1)");
  if (n == 0) throw InputError("generalization_bound: n must be positive");
  const auto nd = static_cast<double>(n);
  return 2.0 * beta_n + (4.0 * nd * beta_n + B) * std::sqrt(std::log(1.0 / delta) / (2.0 * nd));
}

double check_strong_convexity(double a, double b, double p) {
  if (!(p > 1.0 && p <= 2.0)) throw InputError("p must lie in (1,2]");
  const double m = std::max(std::abs(a), std::abs(b));
  if (m == 0.0) throw InputError("check_strong_convexity: (a,b) must not both be zero");
  const double lhs = std::pow(std::abs(a), p) + std::pow(std::abs(b), p) -
                     2.0 * std::pow(std::abs(0.5 * (a + b)), p);
  const double rhs = 0.25 * (b - a) * (b - a) * p * (p - 1.0) * std::pow(m, p - 2.0);
  return lhs - rhs;
}

}  // namespace lpgcn
