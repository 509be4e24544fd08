#include "nscert/local_cert.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nscert/bump.hpp"
#include "nscert/fft.hpp"
#include "nscert/global_cert.hpp"

namespace nscert {

namespace {

constexpr double kTimeTol = 1e-9;

std::array<int, 3> nearest_index(const Grid& g, const std::array<double, 3>& y) {
    std::array<int, 3> idx;
    for (int c = 0; c < 3; ++c) {
        double p = std::fmod(y[c], g.box_length);
        if (p < 0) p += g.box_length;
        int i = int(std::lround(p / g.dx()));
        idx[c] = i % g.n;
    }
    return idx;
}

std::size_t nearest_phys_index(const Grid& g, const std::array<double, 3>& y) {
    auto i = nearest_index(g, y);
    return g.phys_index(i[0], i[1], i[2]);
}

// indices [i0, i1] of the series samples spanning [t0, t1]
std::pair<std::size_t, std::size_t> sample_range(const std::vector<double>& times, double t0,
                                                 double t1) {
    std::size_t i0 = times.size(), i1 = times.size();
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i0 == times.size() && times[i] >= t0 - kTimeTol) i0 = i;
        if (times[i] <= t1 + kTimeTol) i1 = i;
    }
    if (i0 >= times.size() || i1 == times.size() || i1 <= i0)
        throw std::domain_error("interval does not cover at least two series samples");
    return {i0, i1};
}

double trapezoid_weight(std::size_t i, std::size_t i0, std::size_t i1) {
    return (i == i0 || i == i1) ? 0.5 : 1.0;
}

std::vector<std::size_t> ball_points(const Grid& g, const std::array<double, 3>& center,
                                     double radius) {
    std::vector<std::size_t> pts;
    const double r2 = radius * radius;
    for (int ix = 0; ix < g.n; ++ix)
        for (int iy = 0; iy < g.n; ++iy)
            for (int iz = 0; iz < g.n; ++iz) {
                const double p[3] = {g.coord(ix), g.coord(iy), g.coord(iz)};
                if (g.periodic_dist2(p, center.data()) <= r2) pts.push_back(g.phys_index(ix, iy, iz));
            }
    return pts;
}

// space-time L^p over ball x [times[i0], times[i1]], magnitudes per sample
double spacetime_lp(const Grid& g, const std::vector<std::vector<double>>& mags,
                    const std::vector<double>& times, std::size_t i0, std::size_t i1,
                    const std::vector<std::size_t>& pts, double p) {
    if (std::isinf(p)) {
        double sup = 0;
        for (std::size_t i = i0; i <= i1; ++i)
            for (std::size_t idx : pts) sup = std::max(sup, mags[i][idx]);
        return sup;
    }
    const double dt = times[std::min(i0 + 1, i1)] - times[i0];
    double acc = 0;
    for (std::size_t i = i0; i <= i1; ++i) {
        double sp = 0;
        for (std::size_t idx : pts) sp += std::pow(mags[i][idx], p);
        acc += trapezoid_weight(i, i0, i1) * sp;
    }
    return std::pow(acc * dt * g.cell_volume(), 1.0 / p);
}

} // namespace

// ---------------------------------------------------------------------------
// YSet and bumps
// ---------------------------------------------------------------------------

YSet YSet::grid_stride(const Grid& g, int stride) {
    if (stride < 1) throw std::invalid_argument("YSet: stride must be >= 1");
    YSet ys;
    for (int ix = 0; ix < g.n; ix += stride)
        for (int iy = 0; iy < g.n; iy += stride)
            for (int iz = 0; iz < g.n; iz += stride)
                ys.points.push_back({g.coord(ix), g.coord(iy), g.coord(iz)});
    return ys;
}

BumpFunction bump(double r, const std::array<double, 3>& y, const Grid& g) {
    if (!(r > 0)) throw std::domain_error("bump: radius must be positive");
    if (!(2.0 * r < 0.5 * g.box_length))
        throw std::domain_error("bump: 2r must be smaller than half the box length");

    BumpFunction b;
    b.grid = g;
    b.r = r;
    b.center = y;
    b.samples.resize(g.size_phys());
    for (auto& comp : b.grad) comp.resize(g.size_phys());
    b.laplacian.resize(g.size_phys());

    double max_grad = 0, max_lap = 0, mass = 0;
    for (int ix = 0; ix < g.n; ++ix)
        for (int iy = 0; iy < g.n; ++iy)
            for (int iz = 0; iz < g.n; ++iz) {
                const std::size_t idx = g.phys_index(ix, iy, iz);
                const double d[3] = {g.min_image(g.coord(ix) - y[0]),
                                     g.min_image(g.coord(iy) - y[1]),
                                     g.min_image(g.coord(iz) - y[2])};
                const double rho = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
                const double s = rho / r;
                b.samples[idx] = bump_profile::value(s);
                const double dphi = bump_profile::deriv(s) / r;
                if (rho > 0) {
                    for (int c = 0; c < 3; ++c) b.grad[c][idx] = dphi * d[c] / rho;
                    b.laplacian[idx] =
                        (bump_profile::deriv2(s) + 2.0 * bump_profile::deriv(s) / s) / (r * r);
                } else {
                    for (int c = 0; c < 3; ++c) b.grad[c][idx] = 0;
                    b.laplacian[idx] = 3.0 * bump_profile::deriv2(0.0) / (r * r);
                }
                max_grad = std::max(max_grad, std::abs(dphi));
                max_lap = std::max(max_lap, std::abs(b.laplacian[idx]));
                mass += b.samples[idx];
            }
    b.mass = mass * g.cell_volume();
    b.max_grad_times_r = max_grad * r;
    b.max_lap_times_r2 = max_lap * r * r;
    return b;
}

SpectralArray bump_profile_hat(const Grid& g, double r) {
    std::vector<double> phys(g.size_phys());
    for (int ix = 0; ix < g.n; ++ix)
        for (int iy = 0; iy < g.n; ++iy)
            for (int iz = 0; iz < g.n; ++iz) {
                const double d[3] = {g.min_image(g.coord(ix)), g.min_image(g.coord(iy)),
                                     g.min_image(g.coord(iz))};
                const double rho = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
                phys[g.phys_index(ix, iy, iz)] = bump_profile::value(rho / r);
            }
    return fft::to_spectral(g, phys);
}

SpectralArray ball_indicator_hat(const Grid& g, double r) {
    std::vector<double> phys(g.size_phys());
    const double r2 = r * r;
    for (int ix = 0; ix < g.n; ++ix)
        for (int iy = 0; iy < g.n; ++iy)
            for (int iz = 0; iz < g.n; ++iz) {
                const double d[3] = {g.min_image(g.coord(ix)), g.min_image(g.coord(iy)),
                                     g.min_image(g.coord(iz))};
                phys[g.phys_index(ix, iy, iz)] =
                    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) <= r2 ? 1.0 : 0.0;
            }
    return fft::to_spectral(g, phys);
}

// ---------------------------------------------------------------------------
// Exponents
// ---------------------------------------------------------------------------

void LocalExponents::validate() const {
    auto bad = [](const std::string& what) { throw std::invalid_argument("LocalExponents: " + what); };
    if (!(q1 > 2.5)) bad("q1 must exceed 5/2");
    if (!(q2 > 5.0)) bad("q2 must exceed 5");
    if (!(q1_surrogate > 2.5)) bad("q1 surrogate must exceed 5/2");
    if (!(q2_surrogate > 5.0)) bad("q2 surrogate must exceed 5");
    const double inv_q1 = std::isinf(q1) ? 0.0 : 1.0 / q1;
    const double inv_q2 = std::isinf(q2) ? 0.0 : 1.0 / q2;
    const double tol = 1e-12;
    if (std::abs(nu[0] + nu[1] - nu[2] - (-3.0 + 5.0 * inv_q1)) > tol)
        bad("nu1 + nu2 - nu3 must equal -3 + 5/q1");
    if (std::abs(sigma[0] + sigma[1] - sigma[2] - (-2.0 + 5.0 * inv_q2)) > tol)
        bad("sigma1 + sigma2 - sigma3 must equal -2 + 5/q2");
    if (std::abs(lambda[0] + lambda[1] - lambda[2] - 0.5) > tol)
        bad("lambda1 + lambda2 - lambda3 must equal 1/2");
    if (!(nu[0] > 0) || !(sigma[0] > 0) || !(lambda[0] > 0))
        bad("nu1, sigma1, lambda1 must be positive");
    for (int i = 1; i < 3; ++i)
        if (nu[i] < 0 || sigma[i] < 0 || lambda[i] < 0) bad("exponents must be nonnegative");
}

// ---------------------------------------------------------------------------
// Windowed energy (direct quadrature)
// ---------------------------------------------------------------------------

LocalEnergyWindow windowed_energy(const VelocitySeries& v, double t0, double t1, double r,
                                  const YSet& ys) {
    if (ys.points.empty()) throw std::domain_error("windowed_energy: empty center set");
    if (v.fields.empty()) throw std::domain_error("windowed_energy: empty series");
    const Grid& g = v.fields.front().grid;
    auto [i0, i1] = sample_range(v.times, t0, t1);
    const double dt = v.times[i0 + 1] - v.times[i0];

    // per-sample |v|^2 and |grad v|^2 on the grid
    std::vector<std::vector<double>> v2(i1 + 1), gv2(i1 + 1);
    for (std::size_t i = i0; i <= i1; ++i) {
        auto mag = magnitude_physical(v.fields[i]);
        for (auto& x : mag) x *= x;
        v2[i] = std::move(mag);
        auto gmag = magnitude_physical(gradient(v.fields[i]));
        for (auto& x : gmag) x *= x;
        gv2[i] = std::move(gmag);
    }

    LocalEnergyWindow out;
    out.t_start = v.times[i0];
    out.t_end = v.times[i1];
    out.r = r;
    const double cellv = g.cell_volume();
    for (const auto& y : ys.points) {
        BumpFunction phi = bump(r, y, g);
        double diss = 0; // cumulative from t0 (trapezoid)
        double prev_rate = 0;
        for (std::size_t i = i0; i <= i1; ++i) {
            double kin = 0, rate = 0;
            for (std::size_t idx = 0; idx < phi.samples.size(); ++idx) {
                if (phi.samples[idx] == 0) continue;
                kin += 0.5 * v2[i][idx] * phi.samples[idx];
                rate += gv2[i][idx] * phi.samples[idx];
            }
            kin *= cellv;
            rate *= cellv;
            if (i > i0) diss += 0.5 * (prev_rate + rate) * dt;
            prev_rate = rate;
            if (i == i0) continue; // the sup runs over s in (t0, t1]
            const double e = kin + diss;
            if (e > out.e_value) {
                out.e_value = e;
                out.y_max = y;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Source norms, coefficients
// ---------------------------------------------------------------------------

SourceNorms source_norms(const VelocitySeries* a, const VelocitySeries* f, const TensorSeries* g,
                         double r, const YSet& ys, double t0, double t1,
                         const LocalExponents& ex) {
    if (ys.points.empty()) throw std::domain_error("source_norms: empty center set");
    SourceNorms out;
    out.r = r;
    out.t0 = t0;
    out.t1 = t1;

    auto measure = [&](const auto& series, double p) {
        const Grid& grid = series.fields.front().grid;
        auto [i0, i1] = sample_range(series.times, t0, t1);
        std::vector<std::vector<double>> mags(i1 + 1);
        for (std::size_t i = i0; i <= i1; ++i) mags[i] = magnitude_physical(series.fields[i]);
        double sup = 0;
        for (const auto& y : ys.points) {
            auto pts = ball_points(grid, y, 2.0 * r);
            if (pts.empty()) continue;
            sup = std::max(sup, spacetime_lp(grid, mags, series.times, i0, i1, pts, p));
        }
        return sup;
    };

    if (a) out.kappa0 = measure(*a, ex.m_energy);
    if (f) out.kappa1 = measure(*f, ex.q1);
    if (g) out.kappa2 = measure(*g, ex.q2);
    return out;
}

CoefficientSet coefficients(double epsilon, double M, double kappa, double theta,
                            const LocalExponents& ex, double C) {
    if (epsilon < 0 || !(M > 0) || !(C > 0))
        throw std::domain_error("coefficients: need epsilon >= 0, M > 0, C > 0");
    if (!(kappa > 0) || kappa > 1.0 || !(theta > 0) || theta > 1.0)
        throw std::domain_error("coefficients: kappa and theta must lie in (0, 1]");
    const double em = epsilon * M;
    const double bracket = std::pow(em, ex.nu[0]) + std::pow(em, ex.sigma[0]);
    CoefficientSet c;
    c.alpha = C * bracket * std::sqrt(kappa / M);
    c.beta = C * std::pow(theta, 0.2);
    c.gamma = C * std::sqrt(M / kappa);
    c.alpha_p = C * std::pow(bracket, 1.5) * std::pow(M, -2.0) * std::pow(kappa, 3.0);
    c.beta_p = C * std::pow(kappa, 2.25) * std::pow(M, -1.25);
    c.gamma_p = C * std::sqrt(kappa / M) * std::pow(theta, 0.25);
    return c;
}

double induction_alpha(double epsilon, double M, double kappa, const LocalExponents& ex, double C) {
    const double em = epsilon * M;
    const double bracket =
        std::pow(em, ex.nu[0]) + std::pow(em, ex.sigma[0]) + std::pow(em, ex.lambda[0]);
    return C * bracket * std::sqrt(kappa / M);
}

// ---------------------------------------------------------------------------
// Pressure oscillation
// ---------------------------------------------------------------------------

PressureOscillation pressure_oscillation(const ScalarSeries& q, const VelocitySeries& v,
                                         const VelocitySeries* a, const TensorSeries* g,
                                         const VelocitySeries* f, double r, const YSet& ys,
                                         double t0, double t1) {
    if (ys.points.empty()) throw std::domain_error("pressure_oscillation: empty center set");
    const Grid& grid = q.fields.front().grid;
    auto [i0, i1] = sample_range(q.times, t0, t1);
    const double dt = q.times[i0 + 1] - q.times[i0];

    // physical snapshots of q and of the component fields entering qbar;
    // the Riesz components are mean-free, so qbar also carries q's spatial
    // mean (the pressure gauge), making it absorb constants
    std::vector<std::vector<double>> qp(i1 + 1), p123(i1 + 1), p4(i1 + 1);
    std::vector<double> qmean(i1 + 1, 0.0);
    for (std::size_t i = i0; i <= i1; ++i) {
        qp[i] = q.fields[i].to_physical();
        qmean[i] = q.fields[i].coeffs[grid.spec_index(0, 0, 0)].real();
        SpectralTensorField t = outer_product(v.fields[i], v.fields[i]);
        if (a) {
            t += outer_product(a->fields[i], v.fields[i]);
            t += outer_product(v.fields[i], a->fields[i]);
        }
        if (g) t += g->fields[i];
        p123[i] = riesz_contraction(t).to_physical();
        if (f) p4[i] = inverse_laplacian_divergence(f->fields[i]).to_physical();
    }

    PressureOscillation out;
    out.times.assign(q.times.begin() + i0, q.times.begin() + i1 + 1);
    const double cellv = grid.cell_volume();
    for (const auto& y : ys.points) {
        BumpFunction phi = bump(r, y, grid);
        const std::size_t yidx = nearest_phys_index(grid, y);
        auto pts2r = ball_points(grid, y, 2.0 * r);
        std::vector<double> qbar_row;
        double integral = 0;
        for (std::size_t i = i0; i <= i1; ++i) {
            double qbar = p123[i][yidx] + qmean[i];
            if (f) {
                double avg = 0;
                for (std::size_t idx : pts2r) avg += p4[i][idx];
                qbar += pts2r.empty() ? 0.0 : avg / double(pts2r.size());
            }
            qbar_row.push_back(qbar);
            double sp = 0;
            for (std::size_t idx = 0; idx < phi.samples.size(); ++idx) {
                if (phi.samples[idx] == 0) continue;
                sp += std::pow(std::abs(qp[i][idx] - qbar), 1.5) * phi.samples[idx];
            }
            integral += trapezoid_weight(i, i0, i1) * sp * cellv * dt;
        }
        out.qbar.push_back(std::move(qbar_row));
        if (integral > out.value) {
            out.value = integral;
            out.y_max = y;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Nine-term breakdown
// ---------------------------------------------------------------------------

NineTerms local_energy_terms(const VelocitySeries& v, const ScalarSeries& q,
                             const VelocitySeries* a, const VelocitySeries* f,
                             const TensorSeries* g, const BumpFunction& phi, double t0, double t1) {
    const Grid& grid = phi.grid;
    auto [i0, i1] = sample_range(v.times, t0, t1);
    const double dt = v.times[i0 + 1] - v.times[i0];
    const double cellv = grid.cell_volume();

    NineTerms out;
    for (std::size_t i = i0; i <= i1; ++i) {
        const auto vp = v.fields[i].to_physical();
        const auto gv = gradient(v.fields[i]).to_physical();
        const auto qp = q.fields[i].to_physical();
        std::array<std::vector<double>, 3> ap, fp;
        std::array<std::vector<double>, 9> gp;
        if (a) ap = a->fields[i].to_physical();
        if (f) fp = f->fields[i].to_physical();
        if (g) gp = g->fields[i].to_physical();

        std::array<double, 9> acc{};
        for (std::size_t idx = 0; idx < phi.samples.size(); ++idx) {
            const double ph = phi.samples[idx];
            const double gx = phi.grad[0][idx], gy = phi.grad[1][idx], gz = phi.grad[2][idx];
            if (ph == 0 && gx == 0 && gy == 0 && gz == 0 && phi.laplacian[idx] == 0) continue;
            const double v2 = vp[0][idx] * vp[0][idx] + vp[1][idx] * vp[1][idx] +
                              vp[2][idx] * vp[2][idx];
            const double v_dot_gphi = vp[0][idx] * gx + vp[1][idx] * gy + vp[2][idx] * gz;
            acc[0] += 0.5 * v2 * phi.laplacian[idx];
            acc[1] += 0.5 * v2 * v_dot_gphi;
            acc[2] += qp[idx] * v_dot_gphi;
            if (a) {
                const double a_dot_gphi = ap[0][idx] * gx + ap[1][idx] * gy + ap[2][idx] * gz;
                const double v_dot_a = vp[0][idx] * ap[0][idx] + vp[1][idx] * ap[1][idx] +
                                       vp[2][idx] * ap[2][idx];
                acc[3] += 0.5 * v2 * a_dot_gphi;
                double t5 = 0; // v (x) a : phi grad v = v_i a_j phi d_j v_i
                for (int ci = 0; ci < 3; ++ci)
                    for (int cj = 0; cj < 3; ++cj) t5 += vp[ci][idx] * ap[cj][idx] * gv[3 * ci + cj][idx];
                acc[4] += ph * t5;
                acc[5] += v_dot_a * v_dot_gphi; // v (x) v : a (x) grad phi
            }
            if (f)
                acc[6] += ph * (vp[0][idx] * fp[0][idx] + vp[1][idx] * fp[1][idx] +
                                vp[2][idx] * fp[2][idx]);
            if (g) {
                double t8 = 0, t9 = 0;
                const double gphi[3] = {gx, gy, gz};
                for (int ci = 0; ci < 3; ++ci)
                    for (int cj = 0; cj < 3; ++cj) {
                        t8 += gp[3 * ci + cj][idx] * gv[3 * ci + cj][idx];
                        t9 += gp[3 * ci + cj][idx] * vp[ci][idx] * gphi[cj];
                    }
                acc[7] += ph * t8;
                acc[8] += t9;
            }
        }
        const double w = trapezoid_weight(i, i0, i1) * dt * cellv;
        for (int t = 0; t < 9; ++t) out.term[t] += w * acc[t];
    }
    for (double t : out.term) out.sum += t;
    return out;
}

// ---------------------------------------------------------------------------
// Recursion lemma cases
// ---------------------------------------------------------------------------

RecursionCheck energy_recursion_check(double e_cplus, double alpha, double beta, double gamma) {
    if (e_cplus < 0 || alpha < 0 || beta < 0 || gamma < 0)
        throw std::domain_error("energy_recursion_check: inputs must be nonnegative");
    RecursionCheck rc;
    if (!(beta < 0.5)) rc.failed.push_back("beta < 1/2");
    if (!(alpha * gamma < 1.0 / 16.0)) rc.failed.push_back("alpha gamma < 1/16");
    if (!rc.failed.empty()) return rc;

    const double a2 = alpha * alpha;
    if (e_cplus == 0.0) {
        rc.verdict = RecursionCheck::Case::I;
        rc.bound = 16.0 * a2;
    } else if (e_cplus < 16.0 * a2) {
        if (alpha * gamma < 1.0 / 64.0) {
            rc.verdict = RecursionCheck::Case::II;
            rc.bound = 64.0 * a2;
        } else {
            rc.failed.push_back("alpha gamma < 1/64");
        }
    } else if (gamma > 0 && e_cplus <= 1.0 / (256.0 * gamma * gamma)) {
        rc.verdict = RecursionCheck::Case::III;
        rc.bound = 4.0 * e_cplus;
    } else {
        rc.failed.push_back("e(c+) <= 1/(256 gamma^2)");
    }
    return rc;
}

// ---------------------------------------------------------------------------
// eps-regularity quantity
// ---------------------------------------------------------------------------

EpsRegularity eps_regularity_quantity(const VelocitySeries& u, const ScalarSeries& p,
                                      const VelocitySeries* a, const VelocitySeries* f,
                                      const TensorSeries* g, const ParabolicCylinder& cyl,
                                      const LocalExponents& ex, double eps0) {
    const double m = ex.m_epsreg, q1 = ex.q1_eff(), q2 = ex.q2_eff();
    if (!(m > 5.0)) throw std::domain_error("eps_regularity_quantity: m must exceed 5");
    if (!(q1 > 2.5)) throw std::domain_error("eps_regularity_quantity: q1 must exceed 5/2");
    if (!(q2 > 5.0)) throw std::domain_error("eps_regularity_quantity: q2 must exceed 5");
    if (!(cyl.theta > 0) || cyl.theta > 1.0)
        throw std::domain_error("eps_regularity_quantity: theta must lie in (0, 1]");

    const Grid& grid = u.fields.front().grid;
    auto [i0, i1] = sample_range(u.times, cyl.t_bottom(), cyl.t_top);
    const double dt = u.times[i0 + 1] - u.times[i0];
    auto pts = ball_points(grid, cyl.center, cyl.r);
    if (pts.empty()) throw std::domain_error("eps_regularity_quantity: empty cylinder");
    const double cellv = grid.cell_volume();
    const double r = cyl.r;

    auto integral_pow = [&](const std::vector<std::vector<double>>& mags, double power) {
        double acc = 0;
        for (std::size_t i = i0; i <= i1; ++i) {
            double sp = 0;
            for (std::size_t idx : pts) sp += std::pow(mags[i][idx], power);
            acc += trapezoid_weight(i, i0, i1) * sp;
        }
        return acc * dt * cellv;
    };

    std::vector<std::vector<double>> um(i1 + 1), pm(i1 + 1), am, fm, gm;
    for (std::size_t i = i0; i <= i1; ++i) {
        um[i] = magnitude_physical(u.fields[i]);
        pm[i] = magnitude_physical(p.fields[i]);
    }
    if (a) {
        am.resize(i1 + 1);
        for (std::size_t i = i0; i <= i1; ++i) am[i] = magnitude_physical(a->fields[i]);
    }
    if (f) {
        fm.resize(i1 + 1);
        for (std::size_t i = i0; i <= i1; ++i) fm[i] = magnitude_physical(f->fields[i]);
    }
    if (g) {
        gm.resize(i1 + 1);
        for (std::size_t i = i0; i <= i1; ++i) gm[i] = magnitude_physical(g->fields[i]);
    }

    EpsRegularity out;
    out.terms[0] = (integral_pow(um, 3.0) + integral_pow(pm, 1.5)) / (r * r);
    if (a) out.terms[1] = std::pow(r, m - 5.0) * integral_pow(am, m);
    if (f) out.terms[2] = std::pow(r, 3.0 * q1 - 5.0) * integral_pow(fm, q1);
    if (g) out.terms[3] = std::pow(r, 2.0 * q2 - 5.0) * integral_pow(gm, q2);
    out.value = out.terms[0] + out.terms[1] + out.terms[2] + out.terms[3];
    out.threshold = cyl.theta * eps0;
    out.pass = out.value < out.threshold;
    return out;
}

// ---------------------------------------------------------------------------
// Hoelder seminorm diagnostic
// ---------------------------------------------------------------------------

HolderEstimate holder_seminorm_estimate(const VelocitySeries& u, const ParabolicCylinder& cyl,
                                        double alpha_h, const LocalExponents& ex, double Cbar,
                                        int space_stride, int time_stride) {
    const double cap = std::min({2.0 - 5.0 / ex.q1_eff(), 1.0 - 5.0 / ex.q2_eff(),
                                 1.0 - 5.0 / ex.m_epsreg});
    if (!(alpha_h > 0) || !(alpha_h < cap))
        throw std::domain_error("holder_seminorm_estimate: alpha_h out of the admissible range");

    const Grid& grid = u.fields.front().grid;
    auto [i0, i1] = sample_range(u.times, cyl.t_bottom(), cyl.t_top);
    auto pts = ball_points(grid, cyl.center, cyl.r);

    struct Node {
        std::size_t idx;
        std::array<double, 3> x;
        std::size_t it;
    };
    std::vector<Node> nodes;
    for (std::size_t i = i0; i <= i1; i += std::size_t(time_stride)) {
        int count = 0;
        for (std::size_t pidx : pts) {
            if (count++ % space_stride != 0) continue;
            const int iz = int(pidx % grid.n);
            const int iy = int((pidx / grid.n) % grid.n);
            const int ix = int(pidx / (std::size_t(grid.n) * grid.n));
            nodes.push_back({pidx, {grid.coord(ix), grid.coord(iy), grid.coord(iz)}, i});
        }
    }
    if (nodes.size() < 2) throw std::domain_error("holder_seminorm_estimate: too few samples");

    std::vector<std::array<std::vector<double>, 3>> up(i1 + 1);
    for (std::size_t i = i0; i <= i1; ++i) up[i] = u.fields[i].to_physical();

    HolderEstimate out;
    for (std::size_t p1 = 0; p1 < nodes.size(); ++p1)
        for (std::size_t p2 = p1 + 1; p2 < nodes.size(); ++p2) {
            const Node& n1 = nodes[p1];
            const Node& n2 = nodes[p2];
            const double dsp2 = grid.periodic_dist2(n1.x.data(), n2.x.data());
            const double dtm = std::abs(u.times[n1.it] - u.times[n2.it]);
            const double dist = std::sqrt(dsp2 + dtm);
            if (dist == 0) continue;
            double du2 = 0;
            for (int c = 0; c < 3; ++c) {
                const double d = up[n1.it][c][n1.idx] - up[n2.it][c][n2.idx];
                du2 += d * d;
            }
            out.seminorm = std::max(out.seminorm, std::sqrt(du2) / std::pow(dist, alpha_h));
            ++out.pairs;
        }
    out.envelope = Cbar / (cyl.theta * std::pow(cyl.r, 1.0 + alpha_h));
    return out;
}

// ---------------------------------------------------------------------------
// Calderon-Zygmund local bound check
// ---------------------------------------------------------------------------

CzBoundCheck cz_local_bound_check(const ScalarSeries& f, double r, const std::array<double, 3>& x0,
                                  double p, double q, int i, int j, const YSet& alpha_probes,
                                  double C_np, double op_gamma, double kernel_beta) {
    if (f.fields.empty()) throw std::domain_error("cz_local_bound_check: empty series");
    const Grid& grid = f.fields.front().grid;
    const std::size_t nsamp = f.fields.size();
    const double dt = nsamp > 1 ? uniform_step(f.times) : 1.0;

    auto mixed_norm = [&](const std::vector<std::vector<double>>& mags,
                          const std::vector<std::size_t>& pts) {
        std::vector<double> spatial(nsamp);
        for (std::size_t s = 0; s < nsamp; ++s) {
            if (std::isinf(p)) {
                double sup = 0;
                for (std::size_t idx : pts) sup = std::max(sup, std::abs(mags[s][idx]));
                spatial[s] = sup;
            } else {
                double acc = 0;
                for (std::size_t idx : pts) acc += std::pow(std::abs(mags[s][idx]), p);
                spatial[s] = std::pow(acc * grid.cell_volume(), 1.0 / p);
            }
        }
        if (nsamp == 1) return spatial[0];
        if (std::isinf(q)) return *std::max_element(spatial.begin(), spatial.end());
        double acc = 0;
        for (std::size_t s = 0; s < nsamp; ++s)
            acc += trapezoid_weight(s, 0, nsamp - 1) * std::pow(spatial[s], q);
        return std::pow(acc * dt, 1.0 / q);
    };

    // T f per sample, centered at the value in x0
    std::vector<std::vector<double>> tf(nsamp), fm(nsamp);
    const std::size_t x0_idx = nearest_phys_index(grid, x0);
    for (std::size_t s = 0; s < nsamp; ++s) {
        ScalarField t = riesz_tensor(f.fields[s], i, j);
        tf[s] = t.to_physical();
        const double center_value = tf[s][x0_idx];
        for (auto& v : tf[s]) v -= center_value;
        fm[s] = f.fields[s].to_physical();
    }

    CzBoundCheck out;
    out.lhs = mixed_norm(tf, ball_points(grid, x0, r));

    for (const auto& y : alpha_probes.points) {
        auto pts = ball_points(grid, y, r);
        if (pts.empty()) continue;
        out.alpha_measured = std::max(out.alpha_measured, mixed_norm(fm, pts));
    }
    if (!std::isfinite(out.alpha_measured))
        throw std::domain_error("cz_local_bound_check: alpha is not finite");

    out.rhs = C_np * out.alpha_measured * (op_gamma + kernel_beta);
    out.ratio = out.rhs > 0 ? out.lhs / out.rhs : std::numeric_limits<double>::infinity();
    return out;
}

// ---------------------------------------------------------------------------
// Window planning and the induction engine
// ---------------------------------------------------------------------------

WindowPlan plan_local_windows(const LocalCertParams& p) {
    if (!(p.M > 0) || !(p.T > 0)) throw std::domain_error("plan_local_windows: need M, T > 0");
    if (!(p.kappa > 0) || p.kappa > 1 || !(p.theta > 0) || p.theta > 1)
        throw std::domain_error("plan_local_windows: kappa, theta must lie in (0, 1]");
    WindowPlan w;
    const auto& c = p.constants;
    w.N = p.N > 0 ? p.N : long(std::floor(4.0 * c.Cbar * c.Cbar / c.C0)) + 1;
    if (w.N < 4) throw std::domain_error("plan_local_windows: N must be at least 4");
    w.r = p.kappa / p.M;

    const double k_raw = double(w.N) * p.T * p.M * p.M / (p.theta * p.kappa * p.kappa);
    w.K = long(std::ceil(k_raw - 1e-9)) + 1;
    if (w.K <= w.N)
        throw std::domain_error("plan_local_windows: horizon shorter than one induction window");
    w.theta = double(w.N) * p.T * p.M * p.M / (double(w.K - 1) * p.kappa * p.kappa);
    w.tau = w.theta * w.r * w.r;
    w.cadence = p.T / double(w.K - 1);
    return w;
}

namespace {

// subsampled view of a full-grid array on the stride lattice
std::vector<double> subsample(const Grid& g, const std::vector<double>& full, int stride) {
    std::vector<double> out;
    out.reserve(std::size_t(g.n / stride) * (g.n / stride) * (g.n / stride));
    for (int ix = 0; ix < g.n; ix += stride)
        for (int iy = 0; iy < g.n; iy += stride)
            for (int iz = 0; iz < g.n; iz += stride) out.push_back(full[g.phys_index(ix, iy, iz)]);
    return out;
}

std::array<double, 3> stride_coords(const Grid& g, int stride, std::size_t flat) {
    const int per = g.n / stride;
    const int iz = int(flat % per);
    const int iy = int((flat / per) % per);
    const int ix = int(flat / (std::size_t(per) * per));
    return {g.coord(ix * stride), g.coord(iy * stride), g.coord(iz * stride)};
}

std::vector<double> magnitude_pow(const std::vector<double>& mag, double p) {
    std::vector<double> out(mag.size());
    for (std::size_t i = 0; i < mag.size(); ++i) out[i] = std::pow(mag[i], p);
    return out;
}

} // namespace

LocalLedger run_local_induction(VSampleStream& stream, const LocalCertParams& params) {
    params.exponents.validate();
    const auto& cst = params.constants;
    LocalLedger led;
    led.plan = plan_local_windows(params);
    const WindowPlan& plan = led.plan;
    const long N = plan.N, K = plan.K;
    const double r = plan.r, theta = plan.theta;

    led.alpha = induction_alpha(params.epsilon, params.M, params.kappa, params.exponents, cst.C);
    led.beta = cst.C * std::pow(theta, 0.2);
    led.gamma = cst.C * std::sqrt(params.M / params.kappa);
    led.conclusion_bound = 2.0 * cst.Cbar / (std::sqrt(theta) * params.kappa) * params.M;

    const double a2_64 = 64.0 * led.alpha * led.alpha;
    if (!(led.beta < 0.5)) led.failed_conditions.push_back("beta < 1/2");
    if (!(led.alpha * led.gamma < 1.0 / 64.0)) led.failed_conditions.push_back("alpha gamma < 1/64");
    if (!(double(N) > 4.0 * cst.Cbar * cst.Cbar / cst.C0))
        led.failed_conditions.push_back("N > 4 Cbar^2 / C0");
    if (!(theta * params.kappa * params.kappa <= cst.C0))
        led.failed_conditions.push_back("theta kappa^2 <= C0");
    if (led.gamma > 0 && led.alpha > 0 &&
        !(std::pow(4.0, double(K - N)) * a2_64 <= 1.0 / (256.0 * led.gamma * led.gamma)))
        led.failed_conditions.push_back("4^{K-N} 64 alpha^2 <= 1/(256 gamma^2)");

    // ---- streaming pass ----------------------------------------------------
    std::optional<VSample> first = stream.next();
    if (!first) throw std::invalid_argument("run_local_induction: empty sample stream");
    const Grid grid = first->v.grid;
    const int stride = params.y_stride;
    if (grid.n % stride != 0)
        throw std::invalid_argument("run_local_induction: stride must divide n");

    const SpectralArray phi_hat = bump_profile_hat(grid, r);
    const SpectralArray ball_hat = ball_indicator_hat(grid, r);
    const SpectralArray ball2_hat = ball_indicator_hat(grid, 2.0 * r);

    const double q2e = params.exponents.q2_eff();
    const double me = params.exponents.m_epsreg;
    const double cad = plan.cadence;
    const double per_term_threshold = cst.eps0 * theta / 4.0;

    std::vector<std::vector<double>> kin(K), diss(K), cum_v3(K), cum_ue(K), cum_ge(K);
    std::vector<double> cum_ue5, cum_ge_q2; // kappa diagnostics over B_2r
    std::deque<std::vector<double>> q_buffer;
    std::vector<double> prev_rate, prev_v3, prev_ue, prev_ge, prev_ue5, prev_ge2;
    std::vector<double> cum_diss_full, cum_v3_full, cum_ue_full, cum_ge_full;

    auto cumulate = [cad](std::vector<double>& acc, const std::vector<double>& prev,
                          const std::vector<double>& cur) {
        for (std::size_t i = 0; i < cur.size(); ++i) acc[i] += 0.5 * (prev[i] + cur[i]) * cad;
    };

    VSample sample = std::move(*first);
    for (long i = 0; i < K; ++i) {
        if (i > 0) {
            std::optional<VSample> nxt = stream.next();
            if (!nxt) throw std::invalid_argument("run_local_induction: stream ended early");
            sample = std::move(*nxt);
        }
        if (std::abs(sample.t - double(i) * cad) > 1e-7 * std::max(1.0, cad * double(K)))
            throw std::invalid_argument("run_local_induction: sample cadence mismatch");

        auto vmag = magnitude_physical(sample.v);
        std::vector<double> v2 = magnitude_pow(vmag, 2.0);
        for (auto& x : v2) x *= 0.5;
        kin[i] = subsample(grid, convolve_profile(grid, v2, phi_hat), stride);

        auto gmag = magnitude_physical(gradient(sample.v));
        std::vector<double> rate = convolve_profile(grid, magnitude_pow(gmag, 2.0), phi_hat);
        if (i == 0)
            cum_diss_full.assign(rate.size(), 0.0);
        else
            cumulate(cum_diss_full, prev_rate, rate);
        prev_rate = std::move(rate);
        diss[i] = subsample(grid, cum_diss_full, stride);

        std::vector<double> v3 = convolve_profile(grid, magnitude_pow(vmag, 3.0), ball_hat);
        if (i == 0)
            cum_v3_full.assign(v3.size(), 0.0);
        else
            cumulate(cum_v3_full, prev_v3, v3);
        prev_v3 = std::move(v3);
        cum_v3[i] = subsample(grid, cum_v3_full, stride);

        std::vector<double> ue_mag = sample.u_eps ? magnitude_physical(*sample.u_eps)
                                                  : std::vector<double>(grid.size_phys(), 0.0);
        std::vector<double> uem = convolve_profile(grid, magnitude_pow(ue_mag, me), ball_hat);
        if (i == 0)
            cum_ue_full.assign(uem.size(), 0.0);
        else
            cumulate(cum_ue_full, prev_ue, uem);
        prev_ue = std::move(uem);
        cum_ue[i] = subsample(grid, cum_ue_full, stride);

        std::vector<double> ge_mag = sample.g_eps ? magnitude_physical(*sample.g_eps)
                                                  : std::vector<double>(grid.size_phys(), 0.0);
        std::vector<double> gem = convolve_profile(grid, magnitude_pow(ge_mag, q2e), ball_hat);
        if (i == 0)
            cum_ge_full.assign(gem.size(), 0.0);
        else
            cumulate(cum_ge_full, prev_ge, gem);
        prev_ge = std::move(gem);
        cum_ge[i] = subsample(grid, cum_ge_full, stride);

        std::vector<double> ue5 =
            convolve_profile(grid, magnitude_pow(ue_mag, params.exponents.m_energy), ball2_hat);
        std::vector<double> ge2 = convolve_profile(grid, magnitude_pow(ge_mag, q2e), ball2_hat);
        if (i == 0) {
            cum_ue5.assign(ue5.size(), 0.0);
            cum_ge_q2.assign(ge2.size(), 0.0);
        } else {
            cumulate(cum_ue5, prev_ue5, ue5);
            cumulate(cum_ge_q2, prev_ge2, ge2);
        }
        prev_ue5 = std::move(ue5);
        prev_ge2 = std::move(ge2);

        if (sample.q) {
            q_buffer.push_back(sample.q->to_physical());
            if (long(q_buffer.size()) > N + 1) q_buffer.pop_front();
        }

        // eps-regularity entry for induction step k = i (cylinder top t_{k+1})
        if (i >= N && i < K) {
            EpsRegRecord er;
            er.k = i;
            er.t_top = double(i) * cad;
            er.per_term_threshold = per_term_threshold;
            er.caps = {0.0, (4.0 * M_PI / 3.0) * theta * std::pow(params.kappa, 6.0),
                       cst.C * std::pow(params.kappa, 2.5), cst.C * std::pow(params.kappa, 5.0)};

            std::vector<std::size_t> cands;
            const int per = grid.n / stride;
            const int ps = std::max(1, params.probe_stride / stride);
            for (int ix = 0; ix < per; ix += ps)
                for (int iy = 0; iy < per; iy += ps)
                    for (int iz = 0; iz < per; iz += ps)
                        cands.push_back((std::size_t(ix) * per + iy) * per + iz);
            auto argmax_of = [&](const std::vector<double>& hi, const std::vector<double>& lo) {
                std::size_t best = 0;
                double bv = -1;
                for (std::size_t f = 0; f < hi.size(); ++f) {
                    const double v = hi[f] - lo[f];
                    if (v > bv) {
                        bv = v;
                        best = f;
                    }
                }
                return best;
            };
            cands.push_back(argmax_of(cum_v3[i], cum_v3[i - N]));
            cands.push_back(argmax_of(cum_ue[i], cum_ue[i - N]));
            cands.push_back(argmax_of(cum_ge[i], cum_ge[i - N]));

            double worst_total = -1.0;
            for (std::size_t f : cands) {
                const double t1a = (cum_v3[i][f] - cum_v3[i - N][f]) / (r * r);
                const double t2 = std::pow(r, me - 5.0) * (cum_ue[i][f] - cum_ue[i - N][f]);
                const double t4 = std::pow(r, 2.0 * q2e - 5.0) * (cum_ge[i][f] - cum_ge[i - N][f]);
                double t1b = 0;
                if (!q_buffer.empty()) {
                    const auto xy = stride_coords(grid, stride, f);
                    const std::size_t x0 = nearest_phys_index(grid, xy);
                    auto pts = ball_points(grid, xy, r);
                    for (std::size_t bi = 0; bi < q_buffer.size(); ++bi) {
                        const double qc = q_buffer[bi][x0];
                        double sp = 0;
                        for (std::size_t idx : pts)
                            sp += std::pow(std::abs(q_buffer[bi][idx] - qc), 1.5);
                        const double w = (bi == 0 || bi + 1 == q_buffer.size()) ? 0.5 : 1.0;
                        t1b += w * sp;
                    }
                    t1b *= cad * grid.cell_volume() / (r * r);
                }
                const double total = t1a + t1b + t2 + t4;
                if (total > worst_total) {
                    worst_total = total;
                    er.terms = {t1a + t1b, t2, 0.0, t4};
                    er.z0 = stride_coords(grid, stride, f);
                }
            }
            er.pass = true;
            for (double t : er.terms)
                if (!(t < per_term_threshold)) er.pass = false;
            led.eps_reg.push_back(er);
        }
    }

    // ---- window ledger -----------------------------------------------------
    const std::size_t nsub = kin[0].size();
    auto window_value = [&](long j, std::size_t& argmax) {
        double best = 0;
        argmax = 0;
        for (long i = j - N + 1; i <= j - 1; ++i)
            for (std::size_t f = 0; f < nsub; ++f) {
                const double e = kin[i][f] + diss[i][f] - diss[j - N][f];
                if (e > best) {
                    best = e;
                    argmax = f;
                }
            }
        return best;
    };
    auto kinetic_max = [&](long sample_idx) {
        double best = 0;
        for (std::size_t f = 0; f < nsub; ++f) best = std::max(best, kin[sample_idx][f]);
        return best;
    };

    const double base_energy = kinetic_max(0);
    if (led.alpha > 0 && !(base_energy < 16.0 * led.alpha * led.alpha))
        led.failed_conditions.push_back("base energy < 16 alpha^2");

    bool chain_ok = led.failed_conditions.empty();
    double prev_window_value = 0;
    for (long j = N; j <= K; ++j) {
        LocalWindowRecord w;
        w.k = j;
        w.t_k = double(j - 1) * cad;
        std::size_t am = 0;
        w.e_value = window_value(j, am);
        w.y_max = stride_coords(grid, stride, am);
        w.bound = std::pow(4.0, double(j - N)) * a2_64;
        w.handoff = kinetic_max(j - N);

        RecursionCheck rc = energy_recursion_check(w.handoff, led.alpha, led.beta, led.gamma);
        switch (rc.verdict) {
            case RecursionCheck::Case::I: w.case_id = 'i'; break;
            case RecursionCheck::Case::II: w.case_id = 'I'; break;
            case RecursionCheck::Case::III: w.case_id = '3'; break;
            case RecursionCheck::Case::Fail: w.case_id = 'f'; break;
        }
        w.failed = rc.failed;
        if (j > N && w.handoff > prev_window_value * (1.0 + 1e-9) + 1e-300) {
            w.handoff_ok = false;
            w.failed.push_back("handoff <= previous window value");
        }
        if (!(w.e_value <= w.bound)) w.failed.push_back("e <= 4^{k-N} 64 alpha^2");
        if (rc.verdict != RecursionCheck::Case::Fail && !(w.e_value <= rc.bound))
            w.failed.push_back("e <= recursion case bound");

        // windowed energy inequality at the sampled sup
        const double e = w.e_value;
        const double rhs = w.handoff + led.alpha * std::sqrt(e) + led.beta * e +
                           led.gamma * std::pow(e, 1.5);
        w.energy_inequality_ok = e <= rhs * (1.0 + 1e-9) + 1e-300;
        if (!w.energy_inequality_ok) w.failed.push_back("windowed energy inequality");

        w.pass = chain_ok && w.failed.empty();
        chain_ok = w.pass;
        prev_window_value = std::max(w.e_value, w.handoff);
        led.windows.push_back(w);
    }

    led.measured_kappas.r = r;
    led.measured_kappas.t0 = 0;
    led.measured_kappas.t1 = double(K - 1) * cad;
    double k0max = 0, k2max = 0;
    for (double x : cum_ue5) k0max = std::max(k0max, x);
    for (double x : cum_ge_q2) k2max = std::max(k2max, x);
    led.measured_kappas.kappa0 = std::pow(k0max, 1.0 / params.exponents.m_energy);
    led.measured_kappas.kappa2 = std::pow(k2max, 1.0 / q2e);

    bool eps_ok = true;
    for (const auto& er : led.eps_reg) eps_ok = eps_ok && er.pass;
    bool windows_ok = true;
    for (const auto& w : led.windows) windows_ok = windows_ok && w.pass;
    led.pass = led.failed_conditions.empty() && windows_ok && eps_ok;
    return led;
}

// ---------------------------------------------------------------------------
// Precomputed stream and the spec-shaped wrapper
// ---------------------------------------------------------------------------

namespace {

class PrecomputedVStream : public VSampleStream {
  public:
    PrecomputedVStream(const VelocitySeries& v, const LocalSources& s) : v_(v), s_(s) {}

    std::optional<VSample> next() override {
        if (i_ >= v_.fields.size()) return std::nullopt;
        VSample smp;
        smp.t = v_.times[i_];
        smp.v = v_.fields[i_];
        if (s_.u_eps) smp.u_eps = &s_.u_eps->fields[i_];
        if (s_.g_eps) smp.g_eps = &s_.g_eps->fields[i_];
        if (s_.q) smp.q = &s_.q->fields[i_];
        ++i_;
        return smp;
    }

  private:
    const VelocitySeries& v_;
    LocalSources s_;
    std::size_t i_ = 0;
};

} // namespace

LocalLedger run_local_induction(const VelocitySeries& v_traj, const LocalSources& sources,
                                const LocalCertParams& params) {
    PrecomputedVStream stream(v_traj, sources);
    return run_local_induction(stream, params);
}

// ---------------------------------------------------------------------------
// Twin-solver stream
// ---------------------------------------------------------------------------

TwinSolverStream::TwinSolverStream(const SpectralVelocityField& u0, const Regularization& reg,
                                   double cadence, long samples, int substeps, int ref_factor,
                                   SolveOptions opt)
    : coarse_(u0.grid),
      eps_integ_(u0.grid, reg, opt),
      ref_integ_(Grid(u0.grid.n * ref_factor, u0.grid.box_length), Regularization::none(), opt),
      u_eps_(u0),
      u_ref_(prolong_to_grid(u0, Grid(u0.grid.n * ref_factor, u0.grid.box_length))),
      cadence_(cadence),
      samples_(samples),
      substeps_(substeps),
      u_eps_cur_(u0.grid),
      g_eps_cur_(u0.grid),
      q_cur_(u0.grid) {
    if (samples < 2) throw std::invalid_argument("TwinSolverStream: need at least two samples");
    compute_current();
}

void TwinSolverStream::compute_current() {
    u_eps_cur_ = u_eps_;
    g_eps_cur_ = eps_integ_.error_tensor(u_eps_);
    const SpectralVelocityField u_exact = restrict_to_grid(u_ref_, coarse_);
    // q = p - p_eps, both recovered from the systems' own advective tensors
    SpectralTensorField t = outer_product(u_exact, u_exact);
    t -= eps_integ_.advective_tensor(u_eps_);
    q_cur_ = riesz_contraction(t);
    max_linf_ = std::max(max_linf_, linf_norm(u_eps_));
}

std::optional<VSample> TwinSolverStream::next() {
    if (emitted_ >= samples_) return std::nullopt;
    if (emitted_ > 0) {
        const double h = cadence_ / substeps_;
        for (int s = 0; s < substeps_; ++s) u_eps_ = eps_integ_.step(u_eps_, h);
        const double hf = h / 4.0;
        for (int s = 0; s < 4 * substeps_; ++s) u_ref_ = ref_integ_.step(u_ref_, hf);
        compute_current();
    }
    VSample out;
    out.t = double(emitted_) * cadence_;
    out.v = restrict_to_grid(u_ref_, coarse_) - u_eps_;
    out.v.time_tag = out.t;
    out.u_eps = &u_eps_cur_;
    out.g_eps = &g_eps_cur_;
    out.q = &q_cur_;
    ++emitted_;
    return out;
}

} // namespace nscert
