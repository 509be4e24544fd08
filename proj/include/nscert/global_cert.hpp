#pragma once

#include <string>
#include <vector>

#include "nscert/solver.hpp"

namespace nscert {

// ---------------------------------------------------------------------------
// Step budget tau = theta^2 / M^2 and the K-step plan
// ---------------------------------------------------------------------------

struct GlobalBudget {
    double theta = 0; // adjusted so K is an integer
    double tau = 0;   // theta^2 / M^2
    long K = 1;       // K = T M^2 / theta^2 + 1
    double M = 0;
    double T = 0;
};

// rounds K up from the target theta and recomputes theta = sqrt(T M^2/(K-1));
// T = 0 degenerates to K = 1
GlobalBudget plan_steps(double M, double T, double theta_target);

// ---------------------------------------------------------------------------
// One growth-lemma step: certified iff beta < 1/2 and phi0 + alpha < 1/(16 gamma);
// then phi(tau) < 4 (phi0 + alpha)
// ---------------------------------------------------------------------------

struct GrowthStepResult {
    bool certified = false;
    double bound = 0; // 4 (phi0 + alpha) when certified
    std::vector<std::string> failed; // named conditions
};

GrowthStepResult check_growth_step(double phi0, double alpha, double beta, double gamma);

// ---------------------------------------------------------------------------
// K-step induction ledger
// ---------------------------------------------------------------------------

struct LedgerEntry {
    long index = 0;   // induction step j
    double t = 0;     // t_j = (j-1) tau
    double bound = 0; // 4^{2j} alpha
    bool pass = false;
    std::vector<std::string> failed;
};

struct GrowthLedger {
    std::vector<LedgerEntry> entries;
    bool pass = false;
    std::vector<std::string> failed_conditions; // global smallness conditions
    double alpha = 0, beta = 0, gamma = 0;
    double conclusion_bound = 0; // M + 4^{2K} alpha, claimed < 2M
};

// Formal Theorem-1 induction: verifies the two global smallness conditions
// 4^{2K} alpha < M and alpha gamma < 4^{-2K-3}, then chains the growth
// lemma with phi(0) at step j set to the step j-1 bound. phi0_initial < 0
// means the worst case phi(0) = alpha allowed by the hypotheses.
GrowthLedger run_global_induction(const GlobalBudget& budget, double epsilon, double M, double C,
                                  double phi0_initial = -1.0);

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

struct CriterionResult {
    bool pass = false;
    double threshold = 0;
    double epsilon = 0;
    double ratio = 0; // epsilon / threshold
};

// epsilon <= delta1 M^{-1} exp(-mu1 T M^2)
CriterionResult evaluate_criterion_global(double epsilon, double M, double T, double delta1, double mu1);

// T0 = C ||u0||_{L^2}^4
double evaluate_T0(double l2_norm, double C);

struct CorollaryResult {
    bool pass = false;
    double threshold = 0;
    double epsilon = 0;
    double ratio = 0;
    double conclusion_bound = 0; // Ctilde * M
};

// epsilon <= C1 M^{-1} exp(-C2 ||u0||^4 M^2); the conclusion states
// ||u||_inf <= Ctilde M for all time
CorollaryResult evaluate_criterion_corollary(double epsilon, double M, double l2_norm, double C1,
                                             double C2, double Ctilde = 2.0);

// ---------------------------------------------------------------------------
// Twin-error measurement against the ledger envelope
// ---------------------------------------------------------------------------

struct TwinErrorResult {
    std::vector<double> times;
    std::vector<double> error_linf; // |u_eps - u_ref|_inf restricted to the coarse grid
    std::vector<double> envelope;   // 4^{2 ceil(t/tau)} * 4 C eps M^2
    bool within_envelope = false;
    double fitted_rate = 0;   // least-squares slope of log error vs t
    double envelope_rate = 0; // 2 ln 4 / tau
};

// restriction of a finer-grid field to the coarse spectral content, and the
// zero-padding prolongation in the other direction
SpectralVelocityField restrict_to_grid(const SpectralVelocityField& fine, const Grid& coarse);
SpectralVelocityField prolong_to_grid(const SpectralVelocityField& coarse, const Grid& fine);

TwinErrorResult measure_twin_error(const Trajectory& traj_eps, const Trajectory& traj_ref,
                                   double epsilon, double M, double C, double tau);

} // namespace nscert
