#include "nscert/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "nscert/bump.hpp"

namespace nscert {

namespace {

// Simpson quadrature of f over [0,1]
template <typename Fn>
double simpson01(Fn&& f, int intervals) {
    const double h = 1.0 / intervals;
    double acc = f(0.0) + f(1.0);
    for (int i = 1; i < intervals; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return acc * h / 3.0;
}

double bump_kernel(double rho) {
    const double t = 1.0 - rho * rho;
    return t <= 1e-12 ? 0.0 : std::exp(-1.0 / t);
}

double raw_bump_mass() {
    static const double mass =
        simpson01([](double r) { return bump_kernel(r) * r * r; }, 2000);
    return mass;
}

template <typename FieldT>
FieldT apply_table(const FieldT& u, const Grid& g, const std::vector<double>& table) {
    if (!(u.grid == g)) throw std::invalid_argument("multiplier table built for a different grid");
    FieldT out = u;
    if constexpr (std::is_same_v<FieldT, ScalarField>) {
        for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] *= table[i];
    } else {
        for (auto& comp : out.coeffs)
            for (std::size_t i = 0; i < comp.size(); ++i) comp[i] *= table[i];
    }
    return out;
}

template <typename ProfileFn>
std::vector<double> build_radial_table(const Grid& g, double eps, ProfileFn&& profile) {
    std::vector<double> table(g.size_spec());
    std::map<long long, double> cache; // keyed by integer |m|^2
    for (int ix = 0; ix < g.n; ++ix)
        for (int iy = 0; iy < g.n; ++iy)
            for (int iz = 0; iz < g.nz_half(); ++iz) {
                const long long mx = g.mode(ix), my = g.mode(iy), mz = iz;
                const long long m2 = mx * mx + my * my + mz * mz;
                auto it = cache.find(m2);
                if (it == cache.end()) {
                    const double s = eps * g.k0() * std::sqrt(double(m2));
                    it = cache.emplace(m2, profile(s)).first;
                }
                table[g.spec_index(ix, iy, iz)] = it->second;
            }
    return table;
}

void export_radial_csv(const Grid& g, const std::vector<double>& table, const std::string& path) {
    std::map<long long, double> rows;
    for (int ix = 0; ix < g.n; ++ix)
        for (int iy = 0; iy < g.n; ++iy)
            for (int iz = 0; iz < g.nz_half(); ++iz) {
                const long long mx = g.mode(ix), my = g.mode(iy), mz = iz;
                rows.emplace(mx * mx + my * my + mz * mz, table[g.spec_index(ix, iy, iz)]);
            }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "k,multiplier\n";
    out.precision(17);
    for (const auto& [m2, v] : rows) out << g.k0() * std::sqrt(double(m2)) << "," << v << "\n";
}

} // namespace

double Mollifier::profile(double s) {
    if (s == 0.0) return 1.0;
    // 3D radial transform: 4*pi int rho^2 eta(rho) sin(s rho)/(s rho) drho,
    // normalized so the value at s = 0 is exactly 1
    const double raw = simpson01(
        [s](double r) {
            const double x = s * r;
            const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
            return bump_kernel(r) * r * r * sinc;
        },
        2000);
    return std::clamp(raw / raw_bump_mass(), 0.0, 1.0);
}

Mollifier::Mollifier(const Grid& g, double eps) : grid(g), epsilon(eps) {
    if (!(eps > 0)) throw std::domain_error("Mollifier: epsilon must be positive");
    multiplier = build_radial_table(g, eps, [](double s) { return Mollifier::profile(s); });
}

void Mollifier::export_multiplier_csv(const std::string& path) const {
    export_radial_csv(grid, multiplier, path);
}

double SpectralCutoff::profile(double s) { return 1.0 - smoothstep::value(s - 1.0); }

SpectralCutoff::SpectralCutoff(const Grid& g, double eps) : grid(g), epsilon(eps) {
    if (!(eps > 0)) throw std::domain_error("SpectralCutoff: epsilon must be positive");
    multiplier = build_radial_table(g, eps, [](double s) { return SpectralCutoff::profile(s); });
}

void SpectralCutoff::export_multiplier_csv(const std::string& path) const {
    export_radial_csv(grid, multiplier, path);
}

ScalarField mollify(const ScalarField& u, const Mollifier& m) { return apply_table(u, m.grid, m.multiplier); }
SpectralVelocityField mollify(const SpectralVelocityField& u, const Mollifier& m) {
    return apply_table(u, m.grid, m.multiplier);
}
SpectralTensorField mollify(const SpectralTensorField& u, const Mollifier& m) {
    return apply_table(u, m.grid, m.multiplier);
}

ScalarField spectral_cutoff(const ScalarField& w, const SpectralCutoff& c) {
    return apply_table(w, c.grid, c.multiplier);
}
SpectralVelocityField spectral_cutoff(const SpectralVelocityField& w, const SpectralCutoff& c) {
    return apply_table(w, c.grid, c.multiplier);
}
SpectralTensorField spectral_cutoff(const SpectralTensorField& w, const SpectralCutoff& c) {
    return apply_table(w, c.grid, c.multiplier);
}

SpectralTensorField error_tensor_leray(const SpectralVelocityField& u_eps, const Mollifier& m) {
    SpectralVelocityField diff = u_eps - mollify(u_eps, m);
    return outer_product(diff, u_eps);
}

SpectralTensorField error_tensor_projection(const SpectralVelocityField& u_eps, const SpectralCutoff& c) {
    SpectralTensorField t = outer_product(u_eps, u_eps);
    SpectralTensorField out = t;
    for (int comp = 0; comp < 9; ++comp)
        for (std::size_t i = 0; i < out.coeffs[comp].size(); ++i)
            out.coeffs[comp][i] = t.coeffs[comp][i] * (1.0 - c.multiplier[i]);
    return out;
}

} // namespace nscert
