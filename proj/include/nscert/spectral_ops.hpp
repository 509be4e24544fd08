#pragma once

#include <array>
#include <optional>

#include "nscert/field.hpp"

namespace nscert {

// Ball region on the periodic box (minimum-image metric).
struct Ball {
    std::array<double, 3> center{0, 0, 0};
    double radius = 0;
    bool contains(const Grid& g, double x, double y, double z) const {
        const double p[3] = {x, y, z};
        return g.periodic_dist2(p, center.data()) <= radius * radius;
    }
};

// ---------------------------------------------------------------------------
// Fourier-multiplier operators
// ---------------------------------------------------------------------------

// mode-wise I - k k^T / |k|^2; the k = 0 mode passes through unchanged
SpectralVelocityField leray_project(const SpectralVelocityField& w);
// componentwise Leray projection of div g (used by the Duhamel operators)
SpectralVelocityField leray_project_divergence(const SpectralTensorField& g);

// multiply every mode by exp(-|k|^2 t); t < 0 is a domain error
void heat_propagate_inplace(const Grid& g, SpectralArray& a, double t);
ScalarField heat_propagate(const ScalarField& w, double t);
SpectralVelocityField heat_propagate(const SpectralVelocityField& w, double t);
SpectralTensorField heat_propagate(const SpectralTensorField& w, double t);

// (grad w)_{ij} = d_j w_i
SpectralTensorField gradient(const SpectralVelocityField& w);
ScalarField partial_derivative(const ScalarField& w, int axis);
// div over the second index: (div g)_i = d_j g_{ij}
SpectralVelocityField divergence(const SpectralTensorField& g);
ScalarField divergence(const SpectralVelocityField& w);

// mode multiplier k_i k_j / |k|^2, k = 0 mode set to 0 (mean-free gauge)
ScalarField riesz_tensor(const ScalarField& s, int i, int j);
// Laplace^{-1} div f, k = 0 mode set to 0
ScalarField inverse_laplacian_divergence(const SpectralVelocityField& f);

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

// Pointwise magnitude sampled on the grid (|s|, Euclidean, Frobenius).
std::vector<double> magnitude_physical(const ScalarField& f);
std::vector<double> magnitude_physical(const SpectralVelocityField& f);
std::vector<double> magnitude_physical(const SpectralTensorField& f);

// Magnitude on the 2x zero-padded grid (tighter sup estimates). Assumes the
// input is dealiased: coarse Nyquist planes are dropped in the embedding.
std::vector<double> magnitude_padded(const ScalarField& f, Grid& fine_out);
std::vector<double> magnitude_padded(const SpectralVelocityField& f, Grid& fine_out);
std::vector<double> magnitude_padded(const SpectralTensorField& f, Grid& fine_out);

// L^p norm by grid quadrature; Parseval for p = 2 on the full box; the sup
// norm is taken over the 2x padded grid. An empty region is a domain error.
double lp_norm(const ScalarField& f, double p, const std::optional<Ball>& region = {});
double lp_norm(const SpectralVelocityField& f, double p, const std::optional<Ball>& region = {});
double lp_norm(const SpectralTensorField& f, double p, const std::optional<Ball>& region = {});

double linf_norm(const SpectralVelocityField& f);
double l2_norm(const SpectralVelocityField& f);
// || grad w ||_{L^2} via Parseval with |k|^2 weights
double grad_l2_norm(const SpectralVelocityField& f);

// sum_x f(x) * profile(x - y) * dx^3 for every grid point y, via FFT.
// `profile_hat` is the spectral table of a real even profile centered at 0.
std::vector<double> convolve_profile(const Grid& g, const std::vector<double>& f_phys,
                                     const SpectralArray& profile_hat);

// Parseval weight helpers shared by norms and diagnostics.
double parseval_l2(const Grid& g, const SpectralArray& a);

} // namespace nscert
