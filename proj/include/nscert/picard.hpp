#pragma once

#include <vector>

namespace nscert {

// Abstract fixed-point problem x = a + Lx + B(x,x) reduced to its norm
// data: ||a||, ||L|| <= lambda, ||B|| <= gamma.
struct FixedPointProblem {
    double a_norm = 0;
    double lambda = 0;
    double gamma = 0;
};

struct FixedPointReport {
    bool feasible = false;        // 4 lambda ||a|| < (1-lambda)^2 and real roots
    bool smallness_ok = false;    // the stated 4 lambda ||a|| < (1-lambda)^2 alone
    bool roots_real = false;      // discriminant (1-lambda)^2 - 4 gamma ||a|| >= 0
    double r1 = 0;                // smaller root of gamma r^2 - (1-lambda) r + ||a|| = 0
    double r2 = 0;                // larger root (+inf in the linear case)
    std::vector<double> iterates; // scalar majorant s_{n+1} = ||a|| + lambda s_n + gamma s_n^2
    bool converged = false;       // final iterate <= r1 (1 + 1e-9)
};

FixedPointReport picard_fixed_point(const FixedPointProblem& p);

// Guaranteed local existence window T = C0 ||u0||_inf^{-2}; +inf for zero
// data.
double local_existence_time(double u0_linf, double C0);

} // namespace nscert
