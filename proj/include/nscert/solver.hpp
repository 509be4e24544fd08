#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nscert/field.hpp"
#include "nscert/regularization.hpp"
#include "nscert/spectral_ops.hpp"

namespace nscert {

// ---------------------------------------------------------------------------
// Time series of fields on a uniform time grid
// ---------------------------------------------------------------------------

struct VelocitySeries {
    std::vector<double> times;
    std::vector<SpectralVelocityField> fields;
};

struct TensorSeries {
    std::vector<double> times;
    std::vector<SpectralTensorField> fields;
};

// throws std::invalid_argument when the grid is not uniform
double uniform_step(const std::vector<double>& times);

// ---------------------------------------------------------------------------
// Duhamel operators (exponential trapezoidal quadrature, O(h^2) global)
// ---------------------------------------------------------------------------

// F f (t) = int_0^t e^{(t-s) Lap} P f(s) ds on the series' time grid
VelocitySeries duhamel_F(const VelocitySeries& f);
// G g (t) = int_0^t e^{(t-s) Lap} P div g(s) ds
VelocitySeries duhamel_G(const TensorSeries& g);
// B(u,v) = -G(u (x) v) for time-independent u, v sampled on t_grid
VelocitySeries bilinear_B(const SpectralVelocityField& u, const SpectralVelocityField& v,
                          const std::vector<double>& t_grid);

// ---------------------------------------------------------------------------
// Regularized mild solver
// ---------------------------------------------------------------------------

struct Regularization {
    enum class Kind { None, Leray, Projection };
    Kind kind = Kind::None;
    double epsilon = 0;

    static Regularization none() { return {Kind::None, 0.0}; }
    static Regularization leray(double eps) { return {Kind::Leray, eps}; }
    static Regularization projection(double eps) { return {Kind::Projection, eps}; }
};

// Raised when the state leaves the representable regime; carries the last
// time with a finite state.
class BlowUpError : public std::runtime_error {
  public:
    BlowUpError(double t, const std::string& what) : std::runtime_error(what), last_valid_time_(t) {}
    double last_valid_time() const { return last_valid_time_; }

  private:
    double last_valid_time_;
};

struct NormRecord {
    double t = 0;
    double linf = 0;    // padded-grid sup
    double l2 = 0;      // Parseval
    double grad_l2 = 0; // Parseval with |k|^2 weight
};

struct Trajectory {
    Grid grid;
    double h = 0;
    std::vector<NormRecord> norms;       // every norms_every-th step
    std::vector<double> state_times;     // every store_every-th step
    std::vector<SpectralVelocityField> states;
    double max_linf = 0; // running M over recorded norms

    void export_norms_csv(const std::string& path) const;
};

struct SolveOptions {
    int store_every = 1; // state storage cadence in steps
    int norms_every = 1; // norm recording cadence in steps
    double ceiling = 1e6;
    bool enforce_cfl = true;
    double cfl_factor = 0.25;
};

// One integration context: ETDRK2 for du/dt = Lap u - P div(u (x) w)_reg
// with w = u, u * eta_eps or the P_eps-projected product.
class Integrator {
  public:
    Integrator(const Grid& g, const Regularization& reg, SolveOptions opt = {});

    // single ETDRK2 step; h must respect the CFL guard when enforced
    SpectralVelocityField step(const SpectralVelocityField& u, double h) const;

    // dealiased nonlinear term -P div (u (x) w)_reg
    SpectralVelocityField nonlinear(const SpectralVelocityField& u) const;

    // the momentum-equation tensor actually advected (for pressure recovery)
    SpectralTensorField advective_tensor(const SpectralVelocityField& u) const;

    // pressure of the run's own system, zero-mean gauge
    ScalarField pressure(const SpectralVelocityField& u) const;

    // instantaneous error tensor of the regularization (zero for Kind::None)
    SpectralTensorField error_tensor(const SpectralVelocityField& u) const;

    double cfl_limit(const SpectralVelocityField& u, double h) const;

    const Regularization& regularization() const { return reg_; }
    const Grid& grid() const { return grid_; }

  private:
    Grid grid_;
    Regularization reg_;
    SolveOptions opt_;
    std::optional<Mollifier> mollifier_;
    std::optional<SpectralCutoff> cutoff_;

    void check_state(const SpectralVelocityField& u, double t) const;
    friend Trajectory solve(const SpectralVelocityField&, double, double, const Regularization&,
                            const SolveOptions&);
};

Trajectory solve(const SpectralVelocityField& u0, double T, double h, const Regularization& reg,
                 const SolveOptions& opt = {});

// p = R(u (x) u + a (x) u + u (x) a + g) + Lap^{-1} div f with the mean-free
// gauge; null inputs drop the corresponding contribution.
ScalarField pressure_from_velocity(const SpectralVelocityField& u,
                                   const SpectralVelocityField* a = nullptr,
                                   const SpectralTensorField* g = nullptr,
                                   const SpectralVelocityField* f = nullptr);

// contraction -sum_ij riesz(T_ij, i, j): the Fourier form of R(T)
ScalarField riesz_contraction(const SpectralTensorField& t);

} // namespace nscert
