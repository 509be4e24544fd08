#include "nscert/spectral_ops.hpp"

#include <cmath>
#include <stdexcept>

#include "nscert/fft.hpp"

namespace nscert {

namespace {

template <typename Fn>
void for_each_mode(const Grid& g, Fn&& fn) {
    for (int ix = 0; ix < g.n; ++ix)
        for (int iy = 0; iy < g.n; ++iy)
            for (int iz = 0; iz < g.nz_half(); ++iz) fn(ix, iy, iz, g.spec_index(ix, iy, iz));
}

} // namespace

SpectralVelocityField leray_project(const SpectralVelocityField& w) {
    SpectralVelocityField out(w.grid);
    out.time_tag = w.time_tag;
    for_each_mode(w.grid, [&](int ix, int iy, int iz, std::size_t idx) {
        double k[3];
        w.grid.wavevector(ix, iy, iz, k);
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if (k2 == 0) {
            for (int c = 0; c < 3; ++c) out.coeffs[c][idx] = w.coeffs[c][idx];
            return;
        }
        Complex kdotw(0);
        for (int c = 0; c < 3; ++c) kdotw += k[c] * w.coeffs[c][idx];
        for (int c = 0; c < 3; ++c) out.coeffs[c][idx] = w.coeffs[c][idx] - (k[c] / k2) * kdotw;
    });
    return out;
}

SpectralVelocityField leray_project_divergence(const SpectralTensorField& g) {
    return leray_project(divergence(g));
}

void heat_propagate_inplace(const Grid& g, SpectralArray& a, double t) {
    if (t < 0) throw std::domain_error("heat_propagate: negative time");
    if (t == 0) return;
    for_each_mode(g, [&](int ix, int iy, int iz, std::size_t idx) {
        a[idx] *= std::exp(-g.k_squared(ix, iy, iz) * t);
    });
}

ScalarField heat_propagate(const ScalarField& w, double t) {
    ScalarField out = w;
    heat_propagate_inplace(out.grid, out.coeffs, t);
    return out;
}
SpectralVelocityField heat_propagate(const SpectralVelocityField& w, double t) {
    SpectralVelocityField out = w;
    for (auto& c : out.coeffs) heat_propagate_inplace(out.grid, c, t);
    return out;
}
SpectralTensorField heat_propagate(const SpectralTensorField& w, double t) {
    SpectralTensorField out = w;
    for (auto& c : out.coeffs) heat_propagate_inplace(out.grid, c, t);
    return out;
}

SpectralTensorField gradient(const SpectralVelocityField& w) {
    SpectralTensorField out(w.grid);
    for_each_mode(w.grid, [&](int ix, int iy, int iz, std::size_t idx) {
        double k[3];
        w.grid.wavevector(ix, iy, iz, k);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                out.at(i, j)[idx] = Complex(0, k[j]) * w.coeffs[i][idx];
    });
    return out;
}

ScalarField partial_derivative(const ScalarField& w, int axis) {
    ScalarField out(w.grid);
    for_each_mode(w.grid, [&](int ix, int iy, int iz, std::size_t idx) {
        double k[3];
        w.grid.wavevector(ix, iy, iz, k);
        out.coeffs[idx] = Complex(0, k[axis]) * w.coeffs[idx];
    });
    return out;
}

SpectralVelocityField divergence(const SpectralTensorField& g) {
    SpectralVelocityField out(g.grid);
    for_each_mode(g.grid, [&](int ix, int iy, int iz, std::size_t idx) {
        double k[3];
        g.grid.wavevector(ix, iy, iz, k);
        for (int i = 0; i < 3; ++i) {
            Complex s(0);
            for (int j = 0; j < 3; ++j) s += Complex(0, k[j]) * g.at(i, j)[idx];
            out.coeffs[i][idx] = s;
        }
    });
    return out;
}

ScalarField divergence(const SpectralVelocityField& w) {
    ScalarField out(w.grid);
    for_each_mode(w.grid, [&](int ix, int iy, int iz, std::size_t idx) {
        double k[3];
        w.grid.wavevector(ix, iy, iz, k);
        Complex s(0);
        for (int c = 0; c < 3; ++c) s += Complex(0, k[c]) * w.coeffs[c][idx];
        out.coeffs[idx] = s;
    });
    return out;
}

ScalarField riesz_tensor(const ScalarField& s, int i, int j) {
    ScalarField out(s.grid);
    for_each_mode(s.grid, [&](int ix, int iy, int iz, std::size_t idx) {
        double k[3];
        s.grid.wavevector(ix, iy, iz, k);
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        out.coeffs[idx] = (k2 == 0) ? Complex(0) : (k[i] * k[j] / k2) * s.coeffs[idx];
    });
    return out;
}

ScalarField inverse_laplacian_divergence(const SpectralVelocityField& f) {
    ScalarField out(f.grid);
    for_each_mode(f.grid, [&](int ix, int iy, int iz, std::size_t idx) {
        double k[3];
        f.grid.wavevector(ix, iy, iz, k);
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if (k2 == 0) {
            out.coeffs[idx] = Complex(0);
            return;
        }
        Complex kdotf(0);
        for (int c = 0; c < 3; ++c) kdotf += k[c] * f.coeffs[c][idx];
        out.coeffs[idx] = Complex(0, -1.0 / k2) * kdotf;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Magnitudes and norms
// ---------------------------------------------------------------------------

namespace {

// Embed coarse coefficients into the half-spectrum of the 2x grid. Coarse
// Nyquist planes are dropped (all solver fields are dealiased well below
// them).
SpectralArray zero_pad(const Grid& g, const SpectralArray& a, const Grid& fine) {
    SpectralArray out(fine.size_spec(), Complex(0));
    const int half = g.n / 2;
    for (int ix = 0; ix < g.n; ++ix) {
        const int mx = g.mode(ix);
        if (std::abs(mx) == half) continue;
        const int fx = mx >= 0 ? mx : fine.n + mx;
        for (int iy = 0; iy < g.n; ++iy) {
            const int my = g.mode(iy);
            if (std::abs(my) == half) continue;
            const int fy = my >= 0 ? my : fine.n + my;
            for (int iz = 0; iz < half; ++iz)
                out[fine.spec_index(fx, fy, iz)] = a[g.spec_index(ix, iy, iz)];
        }
    }
    return out;
}

std::vector<double> magnitude_from_components(const Grid& g, const std::vector<const SpectralArray*>& comps) {
    std::vector<double> mag(g.size_phys(), 0.0);
    std::vector<double> phys(g.size_phys());
    for (const SpectralArray* c : comps) {
        fft::spectral_to_physical(g, c->data(), phys.data());
        for (std::size_t i = 0; i < mag.size(); ++i) mag[i] += phys[i] * phys[i];
    }
    for (auto& m : mag) m = std::sqrt(m);
    return mag;
}

std::vector<double> magnitude_padded_components(const Grid& g, const std::vector<const SpectralArray*>& comps,
                                                Grid& fine_out) {
    fine_out = Grid(2 * g.n, g.box_length);
    std::vector<double> mag(fine_out.size_phys(), 0.0);
    std::vector<double> phys(fine_out.size_phys());
    for (const SpectralArray* c : comps) {
        SpectralArray padded = zero_pad(g, *c, fine_out);
        fft::spectral_to_physical(fine_out, padded.data(), phys.data());
        for (std::size_t i = 0; i < mag.size(); ++i) mag[i] += phys[i] * phys[i];
    }
    for (auto& m : mag) m = std::sqrt(m);
    return mag;
}

double quadrature_norm(const Grid& g, const std::vector<double>& mag, double p,
                       const std::optional<Ball>& region) {
    if (std::isinf(p)) {
        double worst = -1.0;
        bool any = false;
        for (int ix = 0; ix < g.n; ++ix)
            for (int iy = 0; iy < g.n; ++iy)
                for (int iz = 0; iz < g.n; ++iz) {
                    if (region && !region->contains(g, g.coord(ix), g.coord(iy), g.coord(iz))) continue;
                    any = true;
                    worst = std::max(worst, mag[g.phys_index(ix, iy, iz)]);
                }
        if (!any) throw std::domain_error("norm: empty region");
        return worst;
    }
    double acc = 0;
    bool any = false;
    for (int ix = 0; ix < g.n; ++ix)
        for (int iy = 0; iy < g.n; ++iy)
            for (int iz = 0; iz < g.n; ++iz) {
                if (region && !region->contains(g, g.coord(ix), g.coord(iy), g.coord(iz))) continue;
                any = true;
                acc += std::pow(mag[g.phys_index(ix, iy, iz)], p);
            }
    if (!any) throw std::domain_error("norm: empty region");
    return std::pow(acc * g.cell_volume(), 1.0 / p);
}

template <typename FieldT>
double lp_norm_impl(const FieldT& f, double p, const std::optional<Ball>& region,
                    const std::vector<const SpectralArray*>& comps) {
    if (!(p > 0)) throw std::domain_error("norm: p must be positive");
    if (std::isinf(p)) {
        Grid fine;
        std::vector<double> mag = magnitude_padded_components(f.grid, comps, fine);
        return quadrature_norm(fine, mag, p, region);
    }
    if (p == 2.0 && !region) {
        double acc = 0;
        for (const SpectralArray* c : comps) acc += parseval_l2(f.grid, *c);
        return std::sqrt(acc * f.grid.volume());
    }
    std::vector<double> mag = magnitude_from_components(f.grid, comps);
    return quadrature_norm(f.grid, mag, p, region);
}

std::vector<const SpectralArray*> component_ptrs(const ScalarField& f) { return {&f.coeffs}; }
std::vector<const SpectralArray*> component_ptrs(const SpectralVelocityField& f) {
    return {&f.coeffs[0], &f.coeffs[1], &f.coeffs[2]};
}
std::vector<const SpectralArray*> component_ptrs(const SpectralTensorField& f) {
    std::vector<const SpectralArray*> v;
    for (const auto& c : f.coeffs) v.push_back(&c);
    return v;
}

} // namespace

double parseval_l2(const Grid& g, const SpectralArray& a) {
    double acc = 0;
    for (int ix = 0; ix < g.n; ++ix)
        for (int iy = 0; iy < g.n; ++iy)
            for (int iz = 0; iz < g.nz_half(); ++iz)
                acc += g.spectral_weight(iz) * std::norm(a[g.spec_index(ix, iy, iz)]);
    return acc;
}

std::vector<double> magnitude_physical(const ScalarField& f) {
    return magnitude_from_components(f.grid, component_ptrs(f));
}
std::vector<double> magnitude_physical(const SpectralVelocityField& f) {
    return magnitude_from_components(f.grid, component_ptrs(f));
}
std::vector<double> magnitude_physical(const SpectralTensorField& f) {
    return magnitude_from_components(f.grid, component_ptrs(f));
}

std::vector<double> magnitude_padded(const ScalarField& f, Grid& fine_out) {
    return magnitude_padded_components(f.grid, component_ptrs(f), fine_out);
}
std::vector<double> magnitude_padded(const SpectralVelocityField& f, Grid& fine_out) {
    return magnitude_padded_components(f.grid, component_ptrs(f), fine_out);
}
std::vector<double> magnitude_padded(const SpectralTensorField& f, Grid& fine_out) {
    return magnitude_padded_components(f.grid, component_ptrs(f), fine_out);
}

double lp_norm(const ScalarField& f, double p, const std::optional<Ball>& region) {
    return lp_norm_impl(f, p, region, component_ptrs(f));
}
double lp_norm(const SpectralVelocityField& f, double p, const std::optional<Ball>& region) {
    return lp_norm_impl(f, p, region, component_ptrs(f));
}
double lp_norm(const SpectralTensorField& f, double p, const std::optional<Ball>& region) {
    return lp_norm_impl(f, p, region, component_ptrs(f));
}

double linf_norm(const SpectralVelocityField& f) {
    return lp_norm(f, std::numeric_limits<double>::infinity());
}
double l2_norm(const SpectralVelocityField& f) { return lp_norm(f, 2.0); }

double grad_l2_norm(const SpectralVelocityField& f) {
    double acc = 0;
    for_each_mode(f.grid, [&](int ix, int iy, int iz, std::size_t idx) {
        const double k2 = f.grid.k_squared(ix, iy, iz);
        const double w = f.grid.spectral_weight(iz);
        for (int c = 0; c < 3; ++c) acc += w * k2 * std::norm(f.coeffs[c][idx]);
    });
    return std::sqrt(acc * f.grid.volume());
}

std::vector<double> convolve_profile(const Grid& g, const std::vector<double>& f_phys,
                                     const SpectralArray& profile_hat) {
    SpectralArray fhat = fft::to_spectral(g, f_phys);
    for (std::size_t i = 0; i < fhat.size(); ++i) fhat[i] *= profile_hat[i] * g.volume();
    return fft::to_physical(g, fhat);
}

} // namespace nscert
