#include "nscert/field.hpp"

#include <cmath>
#include <stdexcept>

#include "nscert/fft.hpp"

namespace nscert {

namespace {

std::vector<double> sample(const Grid& g, const std::function<double(double, double, double)>& f) {
    std::vector<double> v(g.size_phys());
    for (int ix = 0; ix < g.n; ++ix)
        for (int iy = 0; iy < g.n; ++iy)
            for (int iz = 0; iz < g.n; ++iz)
                v[g.phys_index(ix, iy, iz)] = f(g.coord(ix), g.coord(iy), g.coord(iz));
    return v;
}

void check_same_grid(const Grid& a, const Grid& b) {
    if (!(a == b)) throw std::invalid_argument("field operation: grid mismatch");
}

} // namespace

ScalarField ScalarField::from_function(const Grid& g, const std::function<double(double, double, double)>& f) {
    ScalarField out(g);
    out.coeffs = fft::to_spectral(g, sample(g, f));
    return out;
}

std::vector<double> ScalarField::to_physical() const { return fft::to_physical(grid, coeffs); }

SpectralVelocityField SpectralVelocityField::from_functions(
    const Grid& g,
    const std::function<double(double, double, double)>& fx,
    const std::function<double(double, double, double)>& fy,
    const std::function<double(double, double, double)>& fz) {
    SpectralVelocityField out(g);
    out.coeffs[0] = fft::to_spectral(g, sample(g, fx));
    out.coeffs[1] = fft::to_spectral(g, sample(g, fy));
    out.coeffs[2] = fft::to_spectral(g, sample(g, fz));
    return out;
}

std::array<std::vector<double>, 3> SpectralVelocityField::to_physical() const {
    return {fft::to_physical(grid, coeffs[0]), fft::to_physical(grid, coeffs[1]),
            fft::to_physical(grid, coeffs[2])};
}

double SpectralVelocityField::max_relative_divergence() const {
    // max over modes of |k.uhat| / |k|, relative to the largest coefficient
    double scale = 0;
    for (const auto& c : coeffs)
        for (const auto& z : c) scale = std::max(scale, std::abs(z));
    if (scale == 0) return 0;

    double worst = 0;
    for (int ix = 0; ix < grid.n; ++ix)
        for (int iy = 0; iy < grid.n; ++iy)
            for (int iz = 0; iz < grid.nz_half(); ++iz) {
                double k[3];
                grid.wavevector(ix, iy, iz, k);
                const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                if (k2 == 0) continue;
                const std::size_t idx = grid.spec_index(ix, iy, iz);
                Complex div(0);
                for (int c = 0; c < 3; ++c) div += k[c] * coeffs[c][idx];
                worst = std::max(worst, std::abs(div) / std::sqrt(k2));
            }
    return worst / scale;
}

SpectralVelocityField& SpectralVelocityField::operator+=(const SpectralVelocityField& o) {
    check_same_grid(grid, o.grid);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < coeffs[c].size(); ++i) coeffs[c][i] += o.coeffs[c][i];
    return *this;
}
SpectralVelocityField& SpectralVelocityField::operator-=(const SpectralVelocityField& o) {
    check_same_grid(grid, o.grid);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < coeffs[c].size(); ++i) coeffs[c][i] -= o.coeffs[c][i];
    return *this;
}
SpectralVelocityField& SpectralVelocityField::operator*=(double s) {
    for (int c = 0; c < 3; ++c)
        for (auto& z : coeffs[c]) z *= s;
    return *this;
}

SpectralVelocityField operator+(SpectralVelocityField a, const SpectralVelocityField& b) { return a += b; }
SpectralVelocityField operator-(SpectralVelocityField a, const SpectralVelocityField& b) { return a -= b; }
SpectralVelocityField operator*(double s, SpectralVelocityField a) { return a *= s; }

std::array<std::vector<double>, 9> SpectralTensorField::to_physical() const {
    std::array<std::vector<double>, 9> out;
    for (int c = 0; c < 9; ++c) out[c] = fft::to_physical(grid, coeffs[c]);
    return out;
}

SpectralTensorField& SpectralTensorField::operator+=(const SpectralTensorField& o) {
    check_same_grid(grid, o.grid);
    for (int c = 0; c < 9; ++c)
        for (std::size_t i = 0; i < coeffs[c].size(); ++i) coeffs[c][i] += o.coeffs[c][i];
    return *this;
}
SpectralTensorField& SpectralTensorField::operator-=(const SpectralTensorField& o) {
    check_same_grid(grid, o.grid);
    for (int c = 0; c < 9; ++c)
        for (std::size_t i = 0; i < coeffs[c].size(); ++i) coeffs[c][i] -= o.coeffs[c][i];
    return *this;
}
SpectralTensorField& SpectralTensorField::operator*=(double s) {
    for (int c = 0; c < 9; ++c)
        for (auto& z : coeffs[c]) z *= s;
    return *this;
}

SpectralTensorField operator+(SpectralTensorField a, const SpectralTensorField& b) { return a += b; }
SpectralTensorField operator-(SpectralTensorField a, const SpectralTensorField& b) { return a -= b; }

void dealias(const Grid& g, SpectralArray& a) {
    for (int ix = 0; ix < g.n; ++ix)
        for (int iy = 0; iy < g.n; ++iy)
            for (int iz = 0; iz < g.nz_half(); ++iz)
                if (!g.dealias_keep(ix, iy, iz)) a[g.spec_index(ix, iy, iz)] = Complex(0);
}

void dealias(ScalarField& f) { dealias(f.grid, f.coeffs); }
void dealias(SpectralVelocityField& f) {
    for (auto& c : f.coeffs) dealias(f.grid, c);
}
void dealias(SpectralTensorField& f) {
    for (auto& c : f.coeffs) dealias(f.grid, c);
}

SpectralTensorField outer_product(const SpectralVelocityField& u, const SpectralVelocityField& v) {
    check_same_grid(u.grid, v.grid);
    const Grid& g = u.grid;

    SpectralVelocityField ud = u;
    SpectralVelocityField vd = v;
    dealias(ud);
    dealias(vd);
    const auto up = ud.to_physical();
    const auto vp = vd.to_physical();

    SpectralTensorField out(g);
    std::vector<double> prod(g.size_phys());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            for (std::size_t m = 0; m < prod.size(); ++m) prod[m] = up[i][m] * vp[j][m];
            fft::physical_to_spectral(g, prod.data(), out.at(i, j).data());
            dealias(g, out.at(i, j));
        }
    return out;
}

} // namespace nscert
