#include "nscert/scenario.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "nscert/fft.hpp"
#include "nscert/snapshot.hpp"
#include "nscert/spectral_ops.hpp"

namespace nscert {

namespace {

double uniform01(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller; avoids std::normal_distribution for cross-build determinism
double gaussian(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    while (u1 == 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace

Scenario Scenario::parse(const std::string& id) {
    Scenario s;
    s.id = id;
    if (id == "taylor-green") s.kind = Kind::TaylorGreen;
    else if (id == "taylor-green-3d") s.kind = Kind::TaylorGreen3D;
    else if (id == "single-mode") s.kind = Kind::SingleMode;
    else if (id == "random-band") s.kind = Kind::RandomBand;
    else if (id.rfind("file:", 0) == 0) {
        s.kind = Kind::File;
        s.path = id.substr(5);
    } else {
        throw std::invalid_argument("unknown scenario id: " + id);
    }
    return s;
}

SpectralVelocityField taylor_green(const Grid& g) {
    auto f = SpectralVelocityField::from_functions(
        g, [](double x, double y, double) { return std::sin(x) * std::cos(y); },
        [](double x, double y, double) { return -std::cos(x) * std::sin(y); },
        [](double, double, double) { return 0.0; });
    return f;
}

SpectralVelocityField taylor_green_3d(const Grid& g) {
    auto f = SpectralVelocityField::from_functions(
        g, [](double x, double y, double z) { return std::sin(x) * std::cos(y) * std::cos(z); },
        [](double x, double y, double z) { return -std::cos(x) * std::sin(y) * std::cos(z); },
        [](double, double, double) { return 0.0; });
    return f;
}

SpectralVelocityField single_mode(const Grid& g) {
    return SpectralVelocityField::from_functions(
        g, [](double, double, double) { return 0.0; },
        [](double x, double, double) { return std::sin(x); },
        [](double, double, double) { return 0.0; });
}

SpectralVelocityField random_band(const Grid& g, std::uint64_t seed, int kmax, double amplitude) {
    std::mt19937_64 rng(seed);
    SpectralVelocityField f(g);
    std::vector<double> phys(g.size_phys());
    for (int c = 0; c < 3; ++c) {
        for (auto& v : phys) v = gaussian(rng);
        fft::physical_to_spectral(g, phys.data(), f.coeffs[c].data());
    }
    // band limit inside the dealiased range
    for (int ix = 0; ix < g.n; ++ix)
        for (int iy = 0; iy < g.n; ++iy)
            for (int iz = 0; iz < g.nz_half(); ++iz) {
                const int mx = g.mode(ix), my = g.mode(iy);
                const bool keep = (mx * mx + my * my + iz * iz) <= kmax * kmax &&
                                  g.dealias_keep(ix, iy, iz);
                if (!keep) {
                    const std::size_t idx = g.spec_index(ix, iy, iz);
                    for (int c = 0; c < 3; ++c) f.coeffs[c][idx] = Complex(0);
                }
            }
    f = leray_project(f);
    // remove the mean flow and normalize the sup norm
    for (int c = 0; c < 3; ++c) f.coeffs[c][g.spec_index(0, 0, 0)] = Complex(0);
    const double sup = linf_norm(f);
    if (sup > 0) f *= amplitude / sup;
    return f;
}

SpectralVelocityField generate_initial_data(const Scenario& s, const Grid& g) {
    switch (s.kind) {
        case Scenario::Kind::TaylorGreen: return taylor_green(g);
        case Scenario::Kind::TaylorGreen3D: return taylor_green_3d(g);
        case Scenario::Kind::SingleMode: return single_mode(g);
        case Scenario::Kind::RandomBand: return random_band(g, s.seed, s.kmax, s.amplitude);
        case Scenario::Kind::File: {
            SpectralVelocityField f = read_velocity_snapshot(s.path);
            if (!(f.grid == g))
                throw std::invalid_argument("scenario file grid does not match configured grid");
            return f;
        }
    }
    throw std::logic_error("unreachable");
}

} // namespace nscert
