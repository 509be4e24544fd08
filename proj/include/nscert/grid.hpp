#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace nscert {

// Uniform periodic grid on [0,L)^3 with the half-spectrum (r2c) Fourier
// layout: for each of the first two axes the integer wavenumber runs over
// [-n/2+1, n/2], for the last axis over [0, n/2]. Physical wavevectors are
// scaled by 2*pi/L.
struct Grid {
    int n = 0;             // points per axis, even, >= 8
    double box_length = 0; // L

    Grid() = default;
    Grid(int n_, double L_) : n(n_), box_length(L_) {
        if (n < 8 || n % 2 != 0)
            throw std::invalid_argument("Grid: n must be even and >= 8");
        if (!(L_ > 0.0))
            throw std::invalid_argument("Grid: box length must be positive");
    }

    bool operator==(const Grid&) const = default;

    int nz_half() const { return n / 2 + 1; }
    std::size_t size_spec() const { return std::size_t(n) * n * nz_half(); }
    std::size_t size_phys() const { return std::size_t(n) * n * n; }

    double dx() const { return box_length / n; }
    double cell_volume() const { return dx() * dx() * dx(); }
    double volume() const { return box_length * box_length * box_length; }
    double k0() const { return 2.0 * M_PI / box_length; }

    // signed integer mode for axis index i in [0,n)
    int mode(int i) const { return i <= n / 2 ? i : i - n; }

    std::size_t spec_index(int ix, int iy, int iz) const {
        return (std::size_t(ix) * n + iy) * nz_half() + iz;
    }
    std::size_t phys_index(int ix, int iy, int iz) const {
        return (std::size_t(ix) * n + iy) * n + iz;
    }

    // physical wavevector of the (ix,iy,iz) half-spectrum entry
    void wavevector(int ix, int iy, int iz, double k[3]) const {
        const double s = k0();
        k[0] = s * mode(ix);
        k[1] = s * mode(iy);
        k[2] = s * iz;
    }
    double k_squared(int ix, int iy, int iz) const {
        double k[3];
        wavevector(ix, iy, iz, k);
        return k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    }

    // multiplicity of a half-spectrum entry in full-spectrum sums:
    // interior z-planes stand for a conjugate pair
    double spectral_weight(int iz) const {
        return (iz == 0 || iz == n / 2) ? 1.0 : 2.0;
    }

    // 2/3-rule dealiasing: mode kept iff |m_axis| <= n/3 on every axis
    bool dealias_keep(int ix, int iy, int iz) const {
        const int cut = n / 3;
        return std::abs(mode(ix)) <= cut && std::abs(mode(iy)) <= cut && iz <= cut;
    }

    // periodic (minimum-image) displacement component
    double min_image(double d) const {
        const double L = box_length;
        d = std::fmod(d, L);
        if (d > 0.5 * L) d -= L;
        if (d < -0.5 * L) d += L;
        return d;
    }
    double periodic_dist2(const double a[3], const double b[3]) const {
        double s = 0;
        for (int c = 0; c < 3; ++c) {
            double d = min_image(a[c] - b[c]);
            s += d * d;
        }
        return s;
    }
    double coord(int i) const { return dx() * i; }
};

} // namespace nscert
