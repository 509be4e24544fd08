#include "nscert/global_cert.hpp"

#include <cmath>
#include <stdexcept>

namespace nscert {

GlobalBudget plan_steps(double M, double T, double theta_target) {
    if (!(M > 0) || !(T >= 0) || !(theta_target > 0))
        throw std::domain_error("plan_steps: need M > 0, T >= 0, theta > 0");

    GlobalBudget b;
    b.M = M;
    b.T = T;
    if (T * M * M == 0.0) {
        b.K = 1;
        b.theta = theta_target;
        b.tau = theta_target * theta_target / (M * M);
        return b;
    }
    const double k_raw = T * M * M / (theta_target * theta_target);
    // snap values a hair above an integer back down before rounding up
    b.K = long(std::ceil(k_raw - 1e-9)) + 1;
    b.theta = std::sqrt(T * M * M / double(b.K - 1));
    b.tau = b.theta * b.theta / (M * M);
    return b;
}

GrowthStepResult check_growth_step(double phi0, double alpha, double beta, double gamma) {
    if (phi0 < 0 || alpha < 0 || beta < 0 || gamma < 0)
        throw std::domain_error("check_growth_step: inputs must be nonnegative");
    GrowthStepResult r;
    if (!(beta < 0.5)) r.failed.push_back("beta < 1/2");
    const double lam = phi0 + alpha;
    if (gamma > 0 && !(lam < 1.0 / (16.0 * gamma))) r.failed.push_back("phi0 + alpha < 1/(16 gamma)");
    r.certified = r.failed.empty();
    if (r.certified) r.bound = 4.0 * lam;
    return r;
}

GrowthLedger run_global_induction(const GlobalBudget& budget, double epsilon, double M, double C,
                                  double phi0_initial) {
    if (!(M > 0) || epsilon < 0 || !(C > 0) || budget.K < 1)
        throw std::domain_error("run_global_induction: invalid inputs");

    GrowthLedger led;
    led.alpha = C * epsilon * M * M;
    led.beta = C * budget.theta;
    led.gamma = C * budget.theta / M;
    const double alpha = led.alpha;
    const long K = budget.K;

    // global smallness conditions of the proof
    const double pow4_2K = std::pow(4.0, 2.0 * double(K));
    if (!(pow4_2K * alpha < M)) led.failed_conditions.push_back("4^{2K} alpha < M");
    if (!(alpha * led.gamma < std::pow(4.0, -2.0 * double(K) - 3.0)))
        led.failed_conditions.push_back("alpha gamma < 4^{-2K-3}");
    if (!(led.beta < 0.5)) led.failed_conditions.push_back("beta < 1/2");

    double phi0 = phi0_initial < 0 ? alpha : phi0_initial;
    if (!(phi0 <= alpha)) led.failed_conditions.push_back("phi(0) <= alpha");

    bool chain_ok = led.failed_conditions.empty();
    double prior_bound = phi0;
    for (long j = 2; j <= K; ++j) {
        LedgerEntry e;
        e.index = j;
        e.t = double(j - 1) * budget.tau;
        e.bound = std::pow(4.0, 2.0 * double(j)) * alpha;
        GrowthStepResult step = check_growth_step(prior_bound, alpha, led.beta, led.gamma);
        e.failed = step.failed;
        e.pass = chain_ok && step.certified;
        chain_ok = e.pass;
        // next window starts from the accumulated bound phi_0(t_j) < 4^{2j} alpha
        prior_bound = e.bound;
        led.entries.push_back(e);
    }
    led.pass = chain_ok && (K == 1 ? led.failed_conditions.empty() : !led.entries.empty());
    led.conclusion_bound = M + pow4_2K * alpha;
    return led;
}

CriterionResult evaluate_criterion_global(double epsilon, double M, double T, double delta1,
                                          double mu1) {
    if (!(M > 0) || !(T >= 0)) throw std::domain_error("evaluate_criterion_global: need M > 0, T >= 0");
    CriterionResult r;
    r.epsilon = epsilon;
    r.threshold = delta1 / M * std::exp(-mu1 * T * M * M);
    r.pass = epsilon <= r.threshold;
    r.ratio = r.threshold > 0 ? epsilon / r.threshold : std::numeric_limits<double>::infinity();
    return r;
}

double evaluate_T0(double l2_norm, double C) {
    if (l2_norm < 0 || C < 0) throw std::domain_error("evaluate_T0: inputs must be nonnegative");
    const double e2 = l2_norm * l2_norm;
    return C * e2 * e2;
}

CorollaryResult evaluate_criterion_corollary(double epsilon, double M, double l2_norm, double C1,
                                             double C2, double Ctilde) {
    if (!(M > 0)) throw std::domain_error("evaluate_criterion_corollary: need M > 0");
    CorollaryResult r;
    r.epsilon = epsilon;
    const double e4 = std::pow(l2_norm, 4.0);
    r.threshold = C1 / M * std::exp(-C2 * e4 * M * M);
    r.pass = epsilon <= r.threshold;
    r.ratio = r.threshold > 0 ? epsilon / r.threshold : std::numeric_limits<double>::infinity();
    r.conclusion_bound = Ctilde * M;
    return r;
}

SpectralVelocityField restrict_to_grid(const SpectralVelocityField& fine, const Grid& coarse) {
    if (fine.grid == coarse) return fine;
    if (fine.grid.n < coarse.n || fine.grid.box_length != coarse.box_length)
        throw std::invalid_argument("restrict_to_grid: incompatible grids");
    SpectralVelocityField out(coarse);
    out.time_tag = fine.time_tag;
    const int half = coarse.n / 2;
    for (int ix = 0; ix < coarse.n; ++ix) {
        const int mx = coarse.mode(ix);
        if (std::abs(mx) == half) continue; // drop coarse Nyquist planes
        const int fx = mx >= 0 ? mx : fine.grid.n + mx;
        for (int iy = 0; iy < coarse.n; ++iy) {
            const int my = coarse.mode(iy);
            if (std::abs(my) == half) continue;
            const int fy = my >= 0 ? my : fine.grid.n + my;
            for (int iz = 0; iz < half; ++iz) {
                const std::size_t src = fine.grid.spec_index(fx, fy, iz);
                const std::size_t dst = coarse.spec_index(ix, iy, iz);
                for (int c = 0; c < 3; ++c) out.coeffs[c][dst] = fine.coeffs[c][src];
            }
        }
    }
    return out;
}

SpectralVelocityField prolong_to_grid(const SpectralVelocityField& coarse, const Grid& fine) {
    if (coarse.grid == fine) return coarse;
    if (fine.n < coarse.grid.n || fine.box_length != coarse.grid.box_length)
        throw std::invalid_argument("prolong_to_grid: incompatible grids");
    SpectralVelocityField out(fine);
    out.time_tag = coarse.time_tag;
    const Grid& g = coarse.grid;
    const int half = g.n / 2;
    for (int ix = 0; ix < g.n; ++ix) {
        const int mx = g.mode(ix);
        if (std::abs(mx) == half) continue; // coarse Nyquist planes dropped
        const int fx = mx >= 0 ? mx : fine.n + mx;
        for (int iy = 0; iy < g.n; ++iy) {
            const int my = g.mode(iy);
            if (std::abs(my) == half) continue;
            const int fy = my >= 0 ? my : fine.n + my;
            for (int iz = 0; iz < half; ++iz) {
                const std::size_t src = g.spec_index(ix, iy, iz);
                const std::size_t dst = fine.spec_index(fx, fy, iz);
                for (int c = 0; c < 3; ++c) out.coeffs[c][dst] = coarse.coeffs[c][src];
            }
        }
    }
    return out;
}

TwinErrorResult measure_twin_error(const Trajectory& traj_eps, const Trajectory& traj_ref,
                                   double epsilon, double M, double C, double tau) {
    TwinErrorResult r;
    r.envelope_rate = tau > 0 ? 2.0 * std::log(4.0) / tau : 0.0;

    // match reference samples to the coarse run's stored times
    std::size_t j = 0;
    for (std::size_t i = 0; i < traj_eps.state_times.size(); ++i) {
        const double t = traj_eps.state_times[i];
        while (j < traj_ref.state_times.size() && traj_ref.state_times[j] < t - 1e-10) ++j;
        if (j >= traj_ref.state_times.size() || std::abs(traj_ref.state_times[j] - t) > 1e-9)
            throw std::invalid_argument("measure_twin_error: misaligned time grids");
        SpectralVelocityField vref = restrict_to_grid(traj_ref.states[j], traj_eps.grid);
        SpectralVelocityField v = traj_eps.states[i] - vref;
        r.times.push_back(t);
        r.error_linf.push_back(linf_norm(v));
        const double amp = tau > 0 ? std::pow(4.0, 2.0 * std::ceil(t / tau)) : 1.0;
        r.envelope.push_back(amp * 4.0 * C * epsilon * M * M);
    }

    r.within_envelope = true;
    for (std::size_t i = 0; i < r.times.size(); ++i)
        if (r.error_linf[i] > r.envelope[i]) r.within_envelope = false;

    // least-squares rate of log ||v|| against t, above a roundoff floor
    const double floor = 1e-14 * std::max(1.0, M);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        if (r.error_linf[i] <= floor) continue;
        const double x = r.times[i], y = std::log(r.error_linf[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt >= 2 && sxx * cnt - sx * sx > 0) r.fitted_rate = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    return r;
}

} // namespace nscert
