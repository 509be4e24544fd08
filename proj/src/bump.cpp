#include "nscert/bump.hpp"

#include <cmath>

namespace nscert {
namespace smoothstep {

namespace {
// exp(-1/u) underflows below ~1/745; treating it as exactly 0 there keeps
// the formulas finite without branching on overflow inside the quotients
constexpr double kTiny = 2e-3;

double rho(double u) { return u <= kTiny ? 0.0 : std::exp(-1.0 / u); }
double rho_d(double u) { return u <= kTiny ? 0.0 : rho(u) / (u * u); }
} // namespace

double value(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double a = rho(u), b = rho(1.0 - u);
    return a / (a + b);
}

double deriv(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double a = rho(u), b = rho(1.0 - u);
    if (a + b == 0.0) return 0.0;
    const double d = a + b;
    const double f = 1.0 / (u * u) + 1.0 / ((1.0 - u) * (1.0 - u));
    return a * b * f / (d * d);
}

double deriv2(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double a = rho(u), b = rho(1.0 - u);
    if (a + b == 0.0) return 0.0;
    const double d = a + b;
    const double ad = rho_d(u);
    const double bd = -rho_d(1.0 - u);
    const double dd = ad + bd;
    const double f = 1.0 / (u * u) + 1.0 / ((1.0 - u) * (1.0 - u));
    const double fd = -2.0 / (u * u * u) + 2.0 / ((1.0 - u) * (1.0 - u) * (1.0 - u));
    return ((ad * b + a * bd) * f + a * b * fd) / (d * d) - 2.0 * a * b * f * dd / (d * d * d);
}

} // namespace smoothstep

namespace bump_profile {

double value(double s) { return 1.0 - smoothstep::value(s - 1.0); }
double deriv(double s) { return -smoothstep::deriv(s - 1.0); }
double deriv2(double s) { return -smoothstep::deriv2(s - 1.0); }

} // namespace bump_profile
} // namespace nscert
