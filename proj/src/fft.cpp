#include "nscert/fft.hpp"

#include <fftw3.h>

#include <cassert>
#include <map>
#include <mutex>

namespace nscert {
namespace fft {

namespace {

struct PlanPair {
    fftw_plan c2r = nullptr;
    fftw_plan r2c = nullptr;
    fftw_complex* spec = nullptr;
    double* phys = nullptr;
};

std::mutex g_mutex;
std::map<int, PlanPair>& plan_table() {
    static std::map<int, PlanPair> t;
    return t;
}

// Plans are created once per grid size with FFTW_ESTIMATE. ESTIMATE keeps
// planning deterministic (MEASURE picks algorithms by timing, which would
// break bitwise reproducibility of reports). All executions go through the
// plan's own aligned scratch buffers under the mutex; c2r destroys its
// input, so callers' coefficients are copied in first.
PlanPair& plans_for_locked(int n) {
    auto& t = plan_table();
    auto it = t.find(n);
    if (it != t.end()) return it->second;

    PlanPair p;
    const std::size_t ns = std::size_t(n) * n * (n / 2 + 1);
    const std::size_t np = std::size_t(n) * n * n;
    p.spec = fftw_alloc_complex(ns);
    p.phys = fftw_alloc_real(np);
    p.c2r = fftw_plan_dft_c2r_3d(n, n, n, p.spec, p.phys, FFTW_ESTIMATE);
    p.r2c = fftw_plan_dft_r2c_3d(n, n, n, p.phys, p.spec, FFTW_ESTIMATE);
    return t.emplace(n, p).first->second;
}

} // namespace

void spectral_to_physical(const Grid& g, const std::complex<double>* coeffs, double* out) {
    std::lock_guard<std::mutex> lock(g_mutex);
    PlanPair& p = plans_for_locked(g.n);
    const std::size_t ns = g.size_spec();
    for (std::size_t i = 0; i < ns; ++i) {
        p.spec[i][0] = coeffs[i].real();
        p.spec[i][1] = coeffs[i].imag();
    }
    fftw_execute(p.c2r);
    const std::size_t np = g.size_phys();
    for (std::size_t i = 0; i < np; ++i) out[i] = p.phys[i];
}

void physical_to_spectral(const Grid& g, const double* values, std::complex<double>* out) {
    std::lock_guard<std::mutex> lock(g_mutex);
    PlanPair& p = plans_for_locked(g.n);
    const std::size_t np = g.size_phys();
    for (std::size_t i = 0; i < np; ++i) p.phys[i] = values[i];
    fftw_execute(p.r2c);
    const double scale = 1.0 / double(np);
    const std::size_t ns = g.size_spec();
    for (std::size_t i = 0; i < ns; ++i)
        out[i] = std::complex<double>(p.spec[i][0] * scale, p.spec[i][1] * scale);
}

std::vector<double> to_physical(const Grid& g, const std::vector<std::complex<double>>& coeffs) {
    assert(coeffs.size() == g.size_spec());
    std::vector<double> out(g.size_phys());
    spectral_to_physical(g, coeffs.data(), out.data());
    return out;
}

std::vector<std::complex<double>> to_spectral(const Grid& g, const std::vector<double>& values) {
    assert(values.size() == g.size_phys());
    std::vector<std::complex<double>> out(g.size_spec());
    physical_to_spectral(g, values.data(), out.data());
    return out;
}

} // namespace fft
} // namespace nscert
