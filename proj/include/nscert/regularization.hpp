#pragma once

#include <string>
#include <vector>

#include "nscert/field.hpp"

namespace nscert {

// Leray mollifier: the standard compactly supported radial bump
// eta(x) = c exp(-1/(1-|x|^2)) on |x| < 1, scaled to B_eps and normalized
// to unit mass. The Fourier profile is precomputed by radial quadrature and
// clamped to [0,1] (the exact transform has exponentially small negative
// ripples; clamping keeps the multiplier a contraction as required).
struct Mollifier {
    Grid grid;
    double epsilon = 0;
    std::vector<double> multiplier; // per half-spectrum mode

    Mollifier(const Grid& g, double eps);

    // normalized radial Fourier profile eta1_hat(s), s = eps |k|
    static double profile(double s);

    void export_multiplier_csv(const std::string& path) const;
};

// Smooth spectral projection P_eps: multiplier 1 for |k| <= 1/eps, 0 for
// |k| >= 2/eps, monotone C-infinity transition in between.
struct SpectralCutoff {
    Grid grid;
    double epsilon = 0;
    std::vector<double> multiplier;

    SpectralCutoff(const Grid& g, double eps);

    static double profile(double s); // psi(s) with s = eps |k|

    void export_multiplier_csv(const std::string& path) const;
};

ScalarField mollify(const ScalarField& u, const Mollifier& m);
SpectralVelocityField mollify(const SpectralVelocityField& u, const Mollifier& m);
SpectralTensorField mollify(const SpectralTensorField& u, const Mollifier& m);

ScalarField spectral_cutoff(const ScalarField& w, const SpectralCutoff& c);
SpectralVelocityField spectral_cutoff(const SpectralVelocityField& w, const SpectralCutoff& c);
SpectralTensorField spectral_cutoff(const SpectralTensorField& w, const SpectralCutoff& c);

// g_eps = (u_eps - u_eps * eta_eps) (x) u_eps, dealiased
SpectralTensorField error_tensor_leray(const SpectralVelocityField& u_eps, const Mollifier& m);
// g_eps = (Id - P_eps)(u_eps (x) u_eps), dealiased
SpectralTensorField error_tensor_projection(const SpectralVelocityField& u_eps, const SpectralCutoff& c);

} // namespace nscert
