#pragma once

#include <span>
#include <vector>

namespace lpgcn {

// Proximal operator of lam * |w|^p on one coordinate: the minimizer of
// (1/2)(w - v)^2 + lam*|w|^p for 1 < p <= 2. Solved from the stationarity
// equation u + lam*p*u^(p-1) = |v| on [0, |v|] by a bracketed
// Newton-bisection hybrid (the derivative term u^(p-2) blows up at 0 for
// p < 2, so Newton steps are only accepted inside the bracket). p = 2 uses
// the closed form v / (1 + 2*lam). The result keeps the sign of v, is zero
// iff v is zero, and satisfies |w*| <= min(|v|, (|v|/(lam*p))^(1/(p-1))).
double prox_lp_scalar(double v, double lam, double p, double tol = 1e-12);

void prox_lp_inplace(std::span<double> v, double lam, double p, double tol = 1e-12);
std::vector<double> prox_lp(std::span<const double> v, double lam, double p,
                            double tol = 1e-12);

// Euclidean projection onto the ball of the given radius. The returned
// vector's computed norm never exceeds radius (rounding after the rescale
// is corrected), which is what lets the iterate bound hold without
// tolerance.
void project_ball_inplace(std::span<double> v, double radius);
std::vector<double> project_ball(std::span<const double> v, double radius);

}  // namespace lpgcn
