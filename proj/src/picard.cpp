#include "nscert/picard.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nscert {

FixedPointReport picard_fixed_point(const FixedPointProblem& p) {
    if (p.a_norm < 0 || p.lambda < 0 || p.gamma < 0)
        throw std::domain_error("picard_fixed_point: norms must be nonnegative");

    FixedPointReport rep;
    const double one_minus = 1.0 - p.lambda;
    rep.smallness_ok = 4.0 * p.lambda * p.a_norm < one_minus * one_minus;

    if (p.gamma == 0.0) {
        // linear case: single root ||a|| / (1 - lambda)
        rep.roots_real = p.lambda < 1.0;
        if (rep.roots_real) {
            rep.r1 = p.a_norm / one_minus;
            rep.r2 = std::numeric_limits<double>::infinity();
        }
    } else {
        const double disc = one_minus * one_minus - 4.0 * p.gamma * p.a_norm;
        rep.roots_real = disc >= 0.0 && p.lambda < 1.0;
        if (rep.roots_real) {
            const double sq = std::sqrt(disc);
            rep.r1 = (one_minus - sq) / (2.0 * p.gamma);
            rep.r2 = (one_minus + sq) / (2.0 * p.gamma);
        }
    }
    rep.feasible = rep.smallness_ok && rep.roots_real;
    if (!rep.feasible) return rep;

    // scalar majorant iteration from 0; monotone and bounded by r1
    double s = 0.0;
    rep.iterates.push_back(s);
    for (int n = 0; n < 200; ++n) {
        const double next = p.a_norm + p.lambda * s + p.gamma * s * s;
        rep.iterates.push_back(next);
        if (std::abs(next - s) <= 1e-15 * (1.0 + std::abs(next))) {
            s = next;
            break;
        }
        s = next;
    }
    rep.converged = s <= rep.r1 * (1.0 + 1e-9) + 1e-300;
    return rep;
}

double local_existence_time(double u0_linf, double C0) {
    if (u0_linf < 0 || C0 <= 0) throw std::domain_error("local_existence_time: bad inputs");
    if (u0_linf == 0.0) return std::numeric_limits<double>::infinity();
    return C0 / (u0_linf * u0_linf);
}

} // namespace nscert
