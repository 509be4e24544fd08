#include "nscert/solver.hpp"

#include <cmath>
#include <fstream>

namespace nscert {

namespace {

// hphi1(z) = h (e^z - 1)/z and hphi2(z) = h (e^z - 1 - z)/z^2 at z = -k^2 h,
// with series fallbacks near z = 0 to avoid cancellation
struct EtdWeights {
    double E, hphi1, hphi2;
};

EtdWeights etd_weights(double k2, double h) {
    const double z = -k2 * h;
    EtdWeights w{};
    w.E = std::exp(z);
    if (std::abs(z) < 1e-3) {
        w.hphi1 = h * (1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0);
        w.hphi2 = h * (0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0);
    } else {
        w.hphi1 = h * std::expm1(z) / z;
        w.hphi2 = h * (std::expm1(z) - z) / (z * z);
    }
    return w;
}

template <typename Fn>
void for_each_mode(const Grid& g, Fn&& fn) {
    for (int ix = 0; ix < g.n; ++ix)
        for (int iy = 0; iy < g.n; ++iy)
            for (int iz = 0; iz < g.nz_half(); ++iz) fn(g.k_squared(ix, iy, iz), g.spec_index(ix, iy, iz));
}

bool has_nonfinite(const SpectralVelocityField& u) {
    for (const auto& c : u.coeffs)
        for (const auto& z : c)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return true;
    return false;
}

} // namespace

double uniform_step(const std::vector<double>& times) {
    if (times.size() < 2) throw std::invalid_argument("time grid needs at least two samples");
    const double h = times[1] - times[0];
    if (!(h > 0)) throw std::invalid_argument("time grid must be increasing");
    for (std::size_t i = 1; i + 1 < times.size(); ++i) {
        const double hi = times[i + 1] - times[i];
        if (std::abs(hi - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw std::invalid_argument("time grid is not uniform");
    }
    return h;
}

// ---------------------------------------------------------------------------
// Duhamel quadrature
// ---------------------------------------------------------------------------

namespace {

// y_{i+1} = E y_i + (hphi1 - hphi2) s_i + hphi2 s_{i+1}: exact linear part,
// source linear within each step
VelocitySeries exponential_trapezoid(const std::vector<double>& times,
                                     const std::vector<SpectralVelocityField>& sources) {
    const Grid& g = sources.front().grid;
    uniform_step(times);
    const double h = times[1] - times[0];

    VelocitySeries out;
    out.times = times;
    out.fields.reserve(times.size());
    SpectralVelocityField y(g);
    y.time_tag = times[0];
    out.fields.push_back(y);
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        SpectralVelocityField next(g);
        next.time_tag = times[i + 1];
        for_each_mode(g, [&](double k2, std::size_t idx) {
            const EtdWeights w = etd_weights(k2, h);
            for (int c = 0; c < 3; ++c)
                next.coeffs[c][idx] = w.E * y.coeffs[c][idx] +
                                      (w.hphi1 - w.hphi2) * sources[i].coeffs[c][idx] +
                                      w.hphi2 * sources[i + 1].coeffs[c][idx];
        });
        y = next;
        out.fields.push_back(y);
    }
    return out;
}

} // namespace

VelocitySeries duhamel_F(const VelocitySeries& f) {
    if (f.fields.empty()) throw std::invalid_argument("duhamel_F: empty series");
    std::vector<SpectralVelocityField> proj;
    proj.reserve(f.fields.size());
    for (const auto& fi : f.fields) proj.push_back(leray_project(fi));
    return exponential_trapezoid(f.times, proj);
}

VelocitySeries duhamel_G(const TensorSeries& g) {
    if (g.fields.empty()) throw std::invalid_argument("duhamel_G: empty series");
    std::vector<SpectralVelocityField> proj;
    proj.reserve(g.fields.size());
    for (const auto& gi : g.fields) proj.push_back(leray_project_divergence(gi));
    return exponential_trapezoid(g.times, proj);
}

VelocitySeries bilinear_B(const SpectralVelocityField& u, const SpectralVelocityField& v,
                          const std::vector<double>& t_grid) {
    if (!(u.grid == v.grid)) throw std::invalid_argument("bilinear_B: grid mismatch");
    TensorSeries g;
    g.times = t_grid;
    g.fields.assign(t_grid.size(), outer_product(u, v));
    VelocitySeries out = duhamel_G(g);
    for (auto& fld : out.fields) fld *= -1.0;
    return out;
}

// ---------------------------------------------------------------------------
// Integrator
// ---------------------------------------------------------------------------

Integrator::Integrator(const Grid& g, const Regularization& reg, SolveOptions opt)
    : grid_(g), reg_(reg), opt_(opt) {
    if (reg.kind == Regularization::Kind::Leray) mollifier_.emplace(g, reg.epsilon);
    if (reg.kind == Regularization::Kind::Projection) cutoff_.emplace(g, reg.epsilon);
}

SpectralTensorField Integrator::advective_tensor(const SpectralVelocityField& u) const {
    switch (reg_.kind) {
        case Regularization::Kind::None: return outer_product(u, u);
        case Regularization::Kind::Leray: return outer_product(u, mollify(u, *mollifier_));
        case Regularization::Kind::Projection: return spectral_cutoff(outer_product(u, u), *cutoff_);
    }
    throw std::logic_error("unreachable");
}

SpectralVelocityField Integrator::nonlinear(const SpectralVelocityField& u) const {
    SpectralVelocityField n = leray_project_divergence(advective_tensor(u));
    n *= -1.0;
    return n;
}

SpectralTensorField Integrator::error_tensor(const SpectralVelocityField& u) const {
    switch (reg_.kind) {
        case Regularization::Kind::None: return SpectralTensorField(grid_);
        case Regularization::Kind::Leray: return error_tensor_leray(u, *mollifier_);
        case Regularization::Kind::Projection: return error_tensor_projection(u, *cutoff_);
    }
    throw std::logic_error("unreachable");
}

ScalarField Integrator::pressure(const SpectralVelocityField& u) const {
    return riesz_contraction(advective_tensor(u));
}

double Integrator::cfl_limit(const SpectralVelocityField& u, double /*h*/) const {
    const double dx = grid_.dx();
    const double sup = linf_norm(u);
    const double advective = sup > 0 ? dx / sup : std::numeric_limits<double>::infinity();
    return opt_.cfl_factor * std::min(advective, dx * dx);
}

void Integrator::check_state(const SpectralVelocityField& u, double t) const {
    if (has_nonfinite(u)) throw BlowUpError(t, "solver state is not finite");
    // cheap native-grid sup is enough for the ceiling guard
    auto mag = magnitude_physical(u);
    double sup = 0;
    for (double m : mag) sup = std::max(sup, m);
    if (sup > opt_.ceiling) throw BlowUpError(t, "solver state exceeded the configured ceiling");
}

SpectralVelocityField Integrator::step(const SpectralVelocityField& u, double h) const {
    if (!(h > 0)) throw std::domain_error("step: h must be positive");
    if (opt_.enforce_cfl) {
        const double limit = cfl_limit(u, h);
        if (h > limit * (1.0 + 1e-12))
            throw std::domain_error("step: h exceeds the CFL guard (limit " + std::to_string(limit) + ")");
    }

    const SpectralVelocityField n0 = nonlinear(u);

    SpectralVelocityField a(grid_);
    for_each_mode(grid_, [&](double k2, std::size_t idx) {
        const EtdWeights w = etd_weights(k2, h);
        for (int c = 0; c < 3; ++c)
            a.coeffs[c][idx] = w.E * u.coeffs[c][idx] + w.hphi1 * n0.coeffs[c][idx];
    });

    const SpectralVelocityField n1 = nonlinear(a);

    SpectralVelocityField out(grid_);
    out.time_tag = u.time_tag + h;
    for_each_mode(grid_, [&](double k2, std::size_t idx) {
        const EtdWeights w = etd_weights(k2, h);
        for (int c = 0; c < 3; ++c)
            out.coeffs[c][idx] =
                a.coeffs[c][idx] + w.hphi2 * (n1.coeffs[c][idx] - n0.coeffs[c][idx]);
    });
    check_state(out, u.time_tag);
    return out;
}

Trajectory solve(const SpectralVelocityField& u0, double T, double h, const Regularization& reg,
                 const SolveOptions& opt) {
    if (!(T >= 0) || !(h > 0)) throw std::domain_error("solve: need T >= 0 and h > 0");
    Integrator integ(u0.grid, reg, opt);

    const long steps = std::lround(T / h);
    if (std::abs(steps * h - T) > 1e-9 * std::max(1.0, T))
        throw std::invalid_argument("solve: T must be an integer number of steps");

    Trajectory traj;
    traj.grid = u0.grid;
    traj.h = h;

    SpectralVelocityField u = u0;
    u.time_tag = 0.0;

    auto record = [&](long i) {
        if (i % opt.norms_every == 0 || i == steps) {
            NormRecord r;
            r.t = u.time_tag;
            r.linf = linf_norm(u);
            r.l2 = l2_norm(u);
            r.grad_l2 = grad_l2_norm(u);
            traj.norms.push_back(r);
            traj.max_linf = std::max(traj.max_linf, r.linf);
        }
        if (i % opt.store_every == 0 || i == steps) {
            traj.state_times.push_back(u.time_tag);
            traj.states.push_back(u);
        }
    };

    record(0);
    for (long i = 1; i <= steps; ++i) {
        u = integ.step(u, h);
        u.time_tag = i * h; // avoid accumulated roundoff in time tags
        record(i);
    }
    return traj;
}

void Trajectory::export_norms_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "t,linf,l2,grad_l2\n";
    out.precision(17);
    for (const auto& r : norms) out << r.t << "," << r.linf << "," << r.l2 << "," << r.grad_l2 << "\n";
}

// ---------------------------------------------------------------------------
// Pressure recovery
// ---------------------------------------------------------------------------

ScalarField riesz_contraction(const SpectralTensorField& t) {
    ScalarField p(t.grid);
    const Grid& g = t.grid;
    for (int ix = 0; ix < g.n; ++ix)
        for (int iy = 0; iy < g.n; ++iy)
            for (int iz = 0; iz < g.nz_half(); ++iz) {
                double k[3];
                g.wavevector(ix, iy, iz, k);
                const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                if (k2 == 0) continue;
                const std::size_t idx = g.spec_index(ix, iy, iz);
                Complex acc(0);
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) acc += k[i] * k[j] * t.at(i, j)[idx];
                p.coeffs[idx] = -acc / k2;
            }
    return p;
}

ScalarField pressure_from_velocity(const SpectralVelocityField& u, const SpectralVelocityField* a,
                                   const SpectralTensorField* g, const SpectralVelocityField* f) {
    SpectralTensorField t = outer_product(u, u);
    if (a) {
        t += outer_product(*a, u);
        t += outer_product(u, *a);
    }
    if (g) t += *g;
    ScalarField p = riesz_contraction(t);
    if (f) {
        ScalarField pf = inverse_laplacian_divergence(*f);
        for (std::size_t i = 0; i < p.coeffs.size(); ++i) p.coeffs[i] += pf.coeffs[i];
    }
    p.coeffs[u.grid.spec_index(0, 0, 0)] = Complex(0); // zero-mean gauge
    return p;
}

} // namespace nscert
