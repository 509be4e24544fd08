#pragma once

#include <string>
#include <vector>

#include "nscert/constants.hpp"
#include "nscert/global_cert.hpp"
#include "nscert/scenario.hpp"
#include "nscert/solver.hpp"

namespace nscert {

// One calibrated constant per checked bound, frozen after the calibration
// pass (see the calibrate verb). Defaults come from the reference scenario
// registry at n = 32.
struct DiagnosticConstants {
    double gradient_bound_C = 4.0;  // |grad u(t)|_inf <= C max{M^2, M/sqrt(t)}
    double duhamel_C = 1.0;         // |G g_eps(t)|_inf <= C eps M^2
    double mollification_C = 1.0;   // |u*eta - u|_inf <= C eps |grad u|_inf
    double decay_C = 1.0;           // |u(t)|_inf <= C |u0|_2 t^{-3/4}
    double twin_envelope_C = 1.0;   // alpha constant of the twin-error envelope
    double energy_slack = 10.0;     // |u(t)|_2 <= |u0|_2 (1 + slack h)
};

struct BoundCheckRecord {
    std::string name;
    double C = 0;
    std::vector<double> times, lhs, rhs;
    double worst_ratio = 0;
    bool pass = false; // worst ratio <= 1 (+1e-12 slack)

    void finalize();
    void export_csv(const std::string& path) const;
};

// |grad u_eps(t)|_inf against C max{M^2, M/sqrt(t)} on the stored states
BoundCheckRecord gradient_bound_check(const Trajectory& traj, double M, double C);

// |G g_eps(t)|_inf against C eps M^2; the Duhamel integral is evaluated by
// the solver's exponential quadrature on the series' grid
BoundCheckRecord duhamel_bound_check(const TensorSeries& g_series, double epsilon, double M,
                                     double C);

// |u*eta_eps - u|_inf against C eps |grad u|_inf along the trajectory
BoundCheckRecord mollification_bound_check(const Trajectory& traj, const Mollifier& m, double C);

// |u(t)|_inf against C |u0|_{L^2} t^{-3/4} on the window [t_min, t_max]
// (the whole-space decay law holds on the torus only in a finite window)
BoundCheckRecord decay_check(const Trajectory& traj, double l2_init, double C, double t_min,
                             double t_max);

// |u(t)|_{L^2} nonincreasing within (1 + slack h)
BoundCheckRecord energy_monotonicity_check(const Trajectory& traj, double slack);

// ---------------------------------------------------------------------------
// Scaling invariance
// ---------------------------------------------------------------------------

struct ScalingScenario {
    Scenario scenario;
    int n = 32;
    double L = 2 * M_PI;
    double T = 0.05;
    double h = 1e-3;
    Regularization reg = Regularization::none();
    double theta_target = 0.1;
    CertificationConstants constants;
};

struct ScalingInvarianceReport {
    double lambda = 1;
    // dimensionless groups, base vs rescaled run
    double epsM_base = 0, epsM_scaled = 0;
    double TM2_base = 0, TM2_scaled = 0;
    double E2M_base = 0, E2M_scaled = 0;
    double worst_group_diff = 0; // max relative difference
    CriterionResult crit_base, crit_scaled;
    bool verdicts_match = false;
    bool pass = false; // groups within 1e-10 and verdicts identical
};

// runs the scenario and its parabolic rescaling u -> lambda u(lambda x,
// lambda^2 t) on the box L/lambda with eps -> eps/lambda, T -> T/lambda^2
ScalingInvarianceReport scaling_invariance_check(const ScalingScenario& s, double lambda);

} // namespace nscert
