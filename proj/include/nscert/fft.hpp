#pragma once

#include <complex>
#include <vector>

#include "nscert/grid.hpp"

namespace nscert {

// FFTW-backed transforms between the coefficient representation
//   u(x) = sum_k uhat(k) exp(i k.x)
// and point values on the n^3 grid. Forward scales by 1/n^3 so that the
// stored array holds genuine Fourier-series coefficients. Plans are cached
// per grid size behind a mutex; execution uses private scratch buffers, so
// concurrent calls from different threads are safe.
namespace fft {

void spectral_to_physical(const Grid& g, const std::complex<double>* coeffs, double* out);
void physical_to_spectral(const Grid& g, const double* values, std::complex<double>* out);

std::vector<double> to_physical(const Grid& g, const std::vector<std::complex<double>>& coeffs);
std::vector<std::complex<double>> to_spectral(const Grid& g, const std::vector<double>& values);

} // namespace fft
} // namespace nscert
