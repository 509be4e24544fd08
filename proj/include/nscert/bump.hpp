#pragma once

namespace nscert {

// C-infinity transition built from rho(u) = exp(-1/u): 0 for u <= 0, 1 for
// u >= 1, strictly monotone in between. First and second derivatives are
// analytic; everything the bump functions and cutoffs need derives from it.
namespace smoothstep {

double value(double u);
double deriv(double u);
double deriv2(double u);

} // namespace smoothstep

// Radial profile phi1: equal to 1 on [0,1], 0 on [2,inf), smooth monotone
// transition on (1,2). phi_r(x) = phi1(|x|/r).
namespace bump_profile {

double value(double s);
double deriv(double s);
double deriv2(double s);

} // namespace bump_profile

} // namespace nscert
