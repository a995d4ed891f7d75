#include "lpgcn/prox.hpp"

#include <algorithm>
#include <cmath>

#include "lpgcn/errors.hpp"
#include "lpgcn/kernels.hpp"

namespace lpgcn {

double prox_lp_scalar(double v, double lam, double p, double tol) {
  if (!(lam > 0.0)) throw InputError("prox_lp: lam must be positive");
  if (!(p > 1.0 && p <= 2.0)) throw InputError("prox_lp: p must lie in (1,2]");
  if (!(tol > 0.0)) throw InputError("prox_lp: tol must be positive");

  const double a = std::abs(v);
  if (a == 0.0) return 0.0;
  if (p == 2.0) return v / (1.0 + 2.0 * lam);

  const double c = lam * p;
  // Root of phi(u) = u + c*u^(p-1) - a on [0, a]; phi(0) = -a < 0,
  // phi(a) = c*a^(p-1) > 0. A Newton step is taken only when it stays
  // inside the bracket and at least halves the previous step, otherwise
  // the interval is bisected, so the bracket shrinks geometrically.
  double lo = 0.0;
  double hi = a;
  double u = a;
  double step_old = a;
  // Tighten to a relative tolerance for small |v| (the contraction caps can
  // sit far below an absolute tol there); floor at a few ulp of |v|.
  const double eff_tol = std::max(tol * std::min(1.0, a), a * 4e-16);
  bool converged = false;
  for (int it = 0; it < 260; ++it) {
    const double f = u + c * std::pow(u, p - 1.0) - a;
    if (f > 0.0) {
      hi = u;
    } else if (f < 0.0) {
      lo = u;
    } else {
      converged = true;
      break;
    }
    if (hi - lo <= eff_tol) {
      u = 0.5 * (lo + hi);
      converged = true;
      break;
    }
    const double df = 1.0 + c * (p - 1.0) * std::pow(u, p - 2.0);
    const double newton = u - f / df;
    const double step = std::abs(f / df);
    if (newton > lo && newton < hi && 2.0 * step <= step_old) {
      u = newton;
      step_old = step;
    } else {
      u = 0.5 * (lo + hi);
      step_old = 0.5 * (hi - lo);
    }
  }
  if (!converged) {
    throw NumericalError("prox_lp: scalar solver failed to converge");
  }
  // The true root obeys both contraction caps; clamp so the returned
  // approximation does too.
  u = std::min(u, a);
  u = std::min(u, std::pow(a / c, 1.0 / (p - 1.0)));
  return std::copysign(u, v);
}

void prox_lp_inplace(std::span<double> v, double lam, double p, double tol) {
  if (p == 2.0) {
    if (!(lam > 0.0)) throw InputError("prox_lp: lam must be positive");
    kernels::scale(1.0 / (1.0 + 2.0 * lam), v.data(), v.size());
    return;
  }
  for (double& x : v) x = prox_lp_scalar(x, lam, p, tol);
}

std::vector<double> prox_lp(std::span<const double> v, double lam, double p, double tol) {
  std::vector<double> out(v.begin(), v.end());
  prox_lp_inplace(out, lam, p, tol);
  return out;
}

void project_ball_inplace(std::span<double> v, double radius) {
  if (radius < 0.0) throw InputError("project_ball: radius must be non-negative");
  const double n2 = kernels::sum_sq(v.data(), v.size());
  const double norm = std::sqrt(n2);
  if (norm <= radius || n2 == 0.0) return;
  kernels::scale(radius / norm, v.data(), v.size());
  // Rounding of the rescale may leave the computed norm a few ulp above the
  // radius; nudge down until it is not.
  for (int k = 0; k < 8; ++k) {
    const double nn = std::sqrt(kernels::sum_sq(v.data(), v.size()));
    if (nn <= radius) break;
    kernels::scale(std::nextafter(radius / nn, 0.0), v.data(), v.size());
  }
}

std::vector<double> project_ball(std::span<const double> v, double radius) {
  std::vector<double> out(v.begin(), v.end());
  project_ball_inplace(out, radius);
  return out;
}

}  // namespace lpgcn
