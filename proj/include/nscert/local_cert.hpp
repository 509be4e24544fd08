#pragma once

#include <array>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nscert/constants.hpp"
#include "nscert/solver.hpp"

namespace nscert {

struct ScalarSeries {
    std::vector<double> times;
    std::vector<ScalarField> fields;
};

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

// Q_{r,theta}(z0) = B_r(x0) x (t - theta r^2, t)
struct ParabolicCylinder {
    std::array<double, 3> center{0, 0, 0};
    double t_top = 0;
    double r = 0;
    double theta = 1.0;

    double t_bottom() const { return t_top - theta * r * r; }
};

// Probe set for sup-over-centers evaluations.
struct YSet {
    std::vector<std::array<double, 3>> points;

    static YSet grid_stride(const Grid& g, int stride);
    static YSet single(const std::array<double, 3>& y) { return {{y}}; }
};

// ---------------------------------------------------------------------------
// Bump functions phi_{r,y}
// ---------------------------------------------------------------------------

struct BumpFunction {
    Grid grid;
    double r = 0;
    std::array<double, 3> center{0, 0, 0};
    std::vector<double> samples;                  // phi on the grid
    std::array<std::vector<double>, 3> grad;      // grad phi
    std::vector<double> laplacian;                // Lap phi
    double mass = 0;                              // grid quadrature of phi
    double max_grad_times_r = 0;                  // recorded C_bump
    double max_lap_times_r2 = 0;                  // recorded C_bump2
};

// 2r must fit in half the box (no periodic self-overlap)
BumpFunction bump(double r, const std::array<double, 3>& y, const Grid& g);

// spectral tables of the centered profile (for convolution sweeps)
SpectralArray bump_profile_hat(const Grid& g, double r);
SpectralArray ball_indicator_hat(const Grid& g, double r);

// ---------------------------------------------------------------------------
// Exponent system (condensedcond)
// ---------------------------------------------------------------------------

struct LocalExponents {
    double q1 = std::numeric_limits<double>::infinity();
    double q2 = std::numeric_limits<double>::infinity();
    double m_energy = 5.0; // L^m slot of the energy estimate (a = u_eps)
    double m_epsreg = 6.0; // L^m slot of the eps-regularity quantity, > 5
    double q1_surrogate = 3.0; // used in the eps-regularity integral when q1 = inf
    double q2_surrogate = 6.0;
    std::array<double, 3> nu{1.0, 0.0, 4.0};
    std::array<double, 3> sigma{1.0, 0.0, 3.0};
    std::array<double, 3> lambda{1.0, 1.5, 2.0};

    double rho() const { return std::min({nu[0], sigma[0], lambda[0]}); }
    double q1_eff() const { return std::isinf(q1) ? q1_surrogate : q1; }
    double q2_eff() const { return std::isinf(q2) ? q2_surrogate : q2; }

    // throws std::invalid_argument on any violation of the exponent system
    void validate() const;
};

// ---------------------------------------------------------------------------
// Windowed local energy
// ---------------------------------------------------------------------------

struct LocalEnergyWindow {
    long k = -1; // window index when produced by the induction
    double t_start = 0, t_end = 0;
    double r = 0;
    double e_value = 0;
    std::array<double, 3> y_max{0, 0, 0};
};

// max over s in (t0, t1] (sampled) and y of the bump-weighted kinetic
// energy plus dissipation accumulated from t0; direct quadrature
LocalEnergyWindow windowed_energy(const VelocitySeries& v, double t0, double t1, double r,
                                  const YSet& ys);

// ---------------------------------------------------------------------------
// Source norms and coefficients
// ---------------------------------------------------------------------------

struct SourceNorms {
    double kappa0 = 0; // sup_y |a|_{L^m(Q)}
    double kappa1 = 0; // sup_y |f|_{L^q1(Q)}
    double kappa2 = 0; // sup_y |g|_{L^q2(Q)}
    double r = 0, t0 = 0, t1 = 0;
};

SourceNorms source_norms(const VelocitySeries* a, const VelocitySeries* f, const TensorSeries* g,
                         double r, const YSet& ys, double t0, double t1,
                         const LocalExponents& ex);

struct CoefficientSet {
    double alpha = 0, beta = 0, gamma = 0;    // energy recursion
    double alpha_p = 0, beta_p = 0, gamma_p = 0; // pressure oscillation
};

// two-term alpha of the energy estimate; kappa and theta must lie in (0,1]
CoefficientSet coefficients(double epsilon, double M, double kappa, double theta,
                            const LocalExponents& ex, double C);

// three-term alpha used by the induction (adds the initial-data exponent)
double induction_alpha(double epsilon, double M, double kappa, const LocalExponents& ex, double C);

// ---------------------------------------------------------------------------
// Pressure oscillation sup_y int int |q - qbar(y,s)|^{3/2} phi_{r,y}
// ---------------------------------------------------------------------------

struct PressureOscillation {
    double value = 0;
    std::array<double, 3> y_max{0, 0, 0};
    std::vector<double> times;
    std::vector<std::vector<double>> qbar; // [y][time] table
};

// qbar(y,s) = p1(y,s) + p2(y,s) + p3(y,s) + [p4(s)]_{B_2r(y)} built from the
// decomposition q = R(v(x)v) + R(a(x)v + v(x)a) + R(g) + Lap^{-1} div f
PressureOscillation pressure_oscillation(const ScalarSeries& q, const VelocitySeries& v,
                                         const VelocitySeries* a, const TensorSeries* g,
                                         const VelocitySeries* f, double r, const YSet& ys,
                                         double t0, double t1);

// ---------------------------------------------------------------------------
// Nine-term local energy breakdown k_y(t0, t1) = {1} + ... + {9}
// ---------------------------------------------------------------------------

struct NineTerms {
    std::array<double, 9> term{};
    double sum = 0;
};

NineTerms local_energy_terms(const VelocitySeries& v, const ScalarSeries& q,
                             const VelocitySeries* a, const VelocitySeries* f,
                             const TensorSeries* g, const BumpFunction& phi, double t0, double t1);

// ---------------------------------------------------------------------------
// Energy recursion lemma cases
// ---------------------------------------------------------------------------

struct RecursionCheck {
    enum class Case { I, II, III, Fail } verdict = Case::Fail;
    double bound = 0;
    std::vector<std::string> failed;
};

RecursionCheck energy_recursion_check(double e_cplus, double alpha, double beta, double gamma);

// ---------------------------------------------------------------------------
// eps-regularity quantity over a parabolic cylinder
// ---------------------------------------------------------------------------

struct EpsRegularity {
    double value = 0;
    std::array<double, 4> terms{}; // velocity+pressure, a, f, g contributions
    double threshold = 0;          // theta * eps0
    bool pass = false;
};

EpsRegularity eps_regularity_quantity(const VelocitySeries& u, const ScalarSeries& p,
                                      const VelocitySeries* a, const VelocitySeries* f,
                                      const TensorSeries* g, const ParabolicCylinder& cyl,
                                      const LocalExponents& ex, double eps0);

// ---------------------------------------------------------------------------
// Parabolic Hoelder seminorm diagnostic
// ---------------------------------------------------------------------------

struct HolderEstimate {
    double seminorm = 0;
    double envelope = 0; // Cbar / (theta r^{1+alpha})
    long pairs = 0;
};

HolderEstimate holder_seminorm_estimate(const VelocitySeries& u, const ParabolicCylinder& cyl,
                                        double alpha_h, const LocalExponents& ex, double Cbar,
                                        int space_stride = 1, int time_stride = 1);

// ---------------------------------------------------------------------------
// Calderon-Zygmund local bound check (centered Riesz composition)
// ---------------------------------------------------------------------------

struct CzBoundCheck {
    double lhs = 0;
    double rhs = 0;
    double ratio = 0;
    double alpha_measured = 0;
};

// T = riesz_tensor(., i, j); lhs = |Tf_t - Tf_t(x0)|_{L^q_t L^p_x(B_r(x0) x Omega)}
CzBoundCheck cz_local_bound_check(const ScalarSeries& f, double r, const std::array<double, 3>& x0,
                                  double p, double q, int i, int j, const YSet& alpha_probes,
                                  double C_np, double op_gamma, double kernel_beta);

// ---------------------------------------------------------------------------
// The N-window induction
// ---------------------------------------------------------------------------

struct VSample {
    double t = 0;
    SpectralVelocityField v;                  // u - u_eps on the analysis grid
    const SpectralVelocityField* u_eps = nullptr;
    const SpectralTensorField* g_eps = nullptr; // + sign convention of (NSE)_eps
    const ScalarField* q = nullptr;             // pressure difference, optional
};

// Incremental source of samples at the cadence tau / N; next() is called
// exactly K times.
class VSampleStream {
  public:
    virtual ~VSampleStream() = default;
    virtual std::optional<VSample> next() = 0;
};

struct LocalCertParams {
    double epsilon = 0;
    double M = 1;
    double kappa = 0.25;
    double theta = 0.5; // target; adjusted so K is an integer
    long N = 0;         // 0 = smallest integer > 4 Cbar^2 / C0
    double T = 0;
    LocalExponents exponents;
    CertificationConstants constants;
    int y_stride = 2;
    int probe_stride = 8;
};

struct WindowPlan {
    long N = 0, K = 0;
    double theta = 0, tau = 0, r = 0, cadence = 0;
};

WindowPlan plan_local_windows(const LocalCertParams& p);

struct LocalWindowRecord {
    long k = 0;
    double t_k = 0;
    double e_value = 0;
    double bound = 0; // 4^{k-N} 64 alpha^2
    char case_id = '-';
    double handoff = 0;
    bool handoff_ok = true;
    bool energy_inequality_ok = true;
    bool pass = false;
    std::array<double, 3> y_max{0, 0, 0};
    std::vector<std::string> failed;
};

struct EpsRegRecord {
    long k = 0;
    double t_top = 0;
    std::array<double, 3> z0{0, 0, 0};
    std::array<double, 4> terms{};
    std::array<double, 4> caps{}; // 0, C theta kappa^6, C kappa^{5/2}, C kappa^5
    double per_term_threshold = 0; // eps0 theta / 4
    bool pass = false;
};

struct LocalLedger {
    bool pass = false;
    std::vector<std::string> failed_conditions;
    std::vector<LocalWindowRecord> windows;
    std::vector<EpsRegRecord> eps_reg;
    double alpha = 0, beta = 0, gamma = 0; // induction coefficients
    WindowPlan plan;
    double conclusion_bound = 0; // 2 Cbar / (sqrt(theta) kappa) * M
    SourceNorms measured_kappas;
};

LocalLedger run_local_induction(VSampleStream& stream, const LocalCertParams& params);

// Spec-shaped wrapper over precomputed series (used by tests and replays).
struct LocalSources {
    const VelocitySeries* u_eps = nullptr;
    const TensorSeries* g_eps = nullptr;
    const ScalarSeries* q = nullptr;
};

LocalLedger run_local_induction(const VelocitySeries& v_traj, const LocalSources& sources,
                                const LocalCertParams& params);

// Twin-solver stream: runs the regularized system at (n, cadence/substeps)
// against an unregularized reference at (ref_factor n, cadence/(4 substeps))
// and emits difference samples on the coarse grid.
class TwinSolverStream : public VSampleStream {
  public:
    TwinSolverStream(const SpectralVelocityField& u0, const Regularization& reg, double cadence,
                     long samples, int substeps = 1, int ref_factor = 2,
                     SolveOptions opt = SolveOptions{});
    std::optional<VSample> next() override;

    double measured_max_linf() const { return max_linf_; }

  private:
    void compute_current();

    Grid coarse_;
    Integrator eps_integ_;
    Integrator ref_integ_;
    SpectralVelocityField u_eps_, u_ref_;
    double cadence_;
    long samples_, emitted_ = 0;
    int substeps_;
    double max_linf_ = 0;
    SpectralVelocityField u_eps_cur_;
    SpectralTensorField g_eps_cur_;
    ScalarField q_cur_;
};

} // namespace nscert
