#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "nscert/grid.hpp"

namespace nscert {

using Complex = std::complex<double>;
using SpectralArray = std::vector<Complex>;

// Scalar field stored as half-spectrum Fourier coefficients.
struct ScalarField {
    Grid grid;
    SpectralArray coeffs;

    ScalarField() = default;
    explicit ScalarField(const Grid& g) : grid(g), coeffs(g.size_spec()) {}

    static ScalarField from_function(const Grid& g, const std::function<double(double, double, double)>& f);
    std::vector<double> to_physical() const;
};

// Divergence-free 3-component velocity field (houses u, u_eps, v, u0, u0_eps).
struct SpectralVelocityField {
    Grid grid;
    std::array<SpectralArray, 3> coeffs;
    double time_tag = 0.0;

    SpectralVelocityField() = default;
    explicit SpectralVelocityField(const Grid& g) : grid(g) {
        for (auto& c : coeffs) c.assign(g.size_spec(), Complex(0));
    }

    static SpectralVelocityField from_functions(
        const Grid& g,
        const std::function<double(double, double, double)>& fx,
        const std::function<double(double, double, double)>& fy,
        const std::function<double(double, double, double)>& fz);

    std::array<std::vector<double>, 3> to_physical() const;

    // worst relative mode-wise divergence |k.uhat| / (|k| |uhat|)
    double max_relative_divergence() const;

    SpectralVelocityField& operator+=(const SpectralVelocityField& o);
    SpectralVelocityField& operator-=(const SpectralVelocityField& o);
    SpectralVelocityField& operator*=(double s);
};

SpectralVelocityField operator+(SpectralVelocityField a, const SpectralVelocityField& b);
SpectralVelocityField operator-(SpectralVelocityField a, const SpectralVelocityField& b);
SpectralVelocityField operator*(double s, SpectralVelocityField a);

// 3x3 tensor field, row-major component order (i,j) -> 3*i+j. Houses
// u (x) v, g_eps and grad u; div acts on the second index.
struct SpectralTensorField {
    Grid grid;
    std::array<SpectralArray, 9> coeffs;

    SpectralTensorField() = default;
    explicit SpectralTensorField(const Grid& g) : grid(g) {
        for (auto& c : coeffs) c.assign(g.size_spec(), Complex(0));
    }

    SpectralArray& at(int i, int j) { return coeffs[3 * i + j]; }
    const SpectralArray& at(int i, int j) const { return coeffs[3 * i + j]; }

    std::array<std::vector<double>, 9> to_physical() const;

    SpectralTensorField& operator+=(const SpectralTensorField& o);
    SpectralTensorField& operator-=(const SpectralTensorField& o);
    SpectralTensorField& operator*=(double s);
};

SpectralTensorField operator+(SpectralTensorField a, const SpectralTensorField& b);
SpectralTensorField operator-(SpectralTensorField a, const SpectralTensorField& b);

// 2/3-rule mask applied in place.
void dealias(const Grid& g, SpectralArray& a);
void dealias(ScalarField& f);
void dealias(SpectralVelocityField& f);
void dealias(SpectralTensorField& f);

// Dealiased pointwise outer product (u_i v_j) computed in physical space.
SpectralTensorField outer_product(const SpectralVelocityField& u, const SpectralVelocityField& v);

} // namespace nscert
