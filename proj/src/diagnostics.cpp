#include "nscert/diagnostics.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace nscert {

void BoundCheckRecord::finalize() {
    worst_ratio = 0;
    for (std::size_t i = 0; i < lhs.size(); ++i)
        if (rhs[i] > 0) worst_ratio = std::max(worst_ratio, lhs[i] / rhs[i]);
    pass = worst_ratio <= 1.0 + 1e-12;
}

void BoundCheckRecord::export_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "t,lhs,rhs,ratio\n";
    out.precision(17);
    for (std::size_t i = 0; i < times.size(); ++i)
        out << times[i] << "," << lhs[i] << "," << rhs[i] << ","
            << (rhs[i] > 0 ? lhs[i] / rhs[i] : 0.0) << "\n";
}

BoundCheckRecord gradient_bound_check(const Trajectory& traj, double M, double C) {
    BoundCheckRecord rec;
    rec.name = "gradient_bound";
    rec.C = C;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const double t = traj.state_times[i];
        if (t == 0.0) continue; // the bound blows up at t = 0+
        rec.times.push_back(t);
        rec.lhs.push_back(lp_norm(gradient(traj.states[i]), std::numeric_limits<double>::infinity()));
        rec.rhs.push_back(C * std::max(M * M, M / std::sqrt(t)));
    }
    rec.finalize();
    if (rec.times.empty()) rec.pass = true; // zero-length run: nothing to check
    return rec;
}

BoundCheckRecord duhamel_bound_check(const TensorSeries& g_series, double epsilon, double M,
                                     double C) {
    BoundCheckRecord rec;
    rec.name = "duhamel_bound";
    rec.C = C;
    VelocitySeries gg = duhamel_G(g_series);
    for (std::size_t i = 0; i < gg.times.size(); ++i) {
        rec.times.push_back(gg.times[i]);
        rec.lhs.push_back(linf_norm(gg.fields[i]));
        rec.rhs.push_back(C * epsilon * M * M);
    }
    rec.finalize();
    return rec;
}

BoundCheckRecord mollification_bound_check(const Trajectory& traj, const Mollifier& m, double C) {
    BoundCheckRecord rec;
    rec.name = "mollification_error";
    rec.C = C;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const SpectralVelocityField& u = traj.states[i];
        SpectralVelocityField diff = u - mollify(u, m);
        rec.times.push_back(traj.state_times[i]);
        rec.lhs.push_back(linf_norm(diff));
        rec.rhs.push_back(C * m.epsilon *
                          lp_norm(gradient(u), std::numeric_limits<double>::infinity()));
    }
    rec.finalize();
    return rec;
}

BoundCheckRecord decay_check(const Trajectory& traj, double l2_init, double C, double t_min,
                             double t_max) {
    BoundCheckRecord rec;
    rec.name = "linf_decay";
    rec.C = C;
    for (const auto& r : traj.norms) {
        if (r.t < t_min || r.t > t_max) continue;
        rec.times.push_back(r.t);
        rec.lhs.push_back(r.linf);
        rec.rhs.push_back(C * l2_init * std::pow(r.t, -0.75));
    }
    rec.finalize();
    return rec;
}

BoundCheckRecord energy_monotonicity_check(const Trajectory& traj, double slack) {
    BoundCheckRecord rec;
    rec.name = "energy_monotonicity";
    rec.C = slack;
    double running = traj.norms.empty() ? 0.0 : traj.norms.front().l2;
    for (const auto& r : traj.norms) {
        rec.times.push_back(r.t);
        rec.lhs.push_back(r.l2);
        rec.rhs.push_back(running * (1.0 + slack * traj.h));
        running = std::min(running, r.l2);
    }
    rec.finalize();
    return rec;
}

// ---------------------------------------------------------------------------
// Scaling invariance
// ---------------------------------------------------------------------------

namespace {

SpectralVelocityField rescale_initial_data(const SpectralVelocityField& u0, double lambda) {
    // u0'(x) = lambda u0(lambda x) on the box L/lambda: same integer modes,
    // coefficients scaled by lambda
    SpectralVelocityField out(Grid(u0.grid.n, u0.grid.box_length / lambda));
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < u0.coeffs[c].size(); ++i)
            out.coeffs[c][i] = lambda * u0.coeffs[c][i];
    return out;
}

double rel_diff(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

} // namespace

ScalingInvarianceReport scaling_invariance_check(const ScalingScenario& s, double lambda) {
    if (!(lambda > 0)) throw std::domain_error("scaling_invariance_check: lambda must be positive");

    ScalingInvarianceReport rep;
    rep.lambda = lambda;

    const Grid base_grid(s.n, s.L);
    SpectralVelocityField u0 = generate_initial_data(s.scenario, base_grid);
    Trajectory base = solve(u0, s.T, s.h, s.reg);
    const double M_base = base.max_linf;
    const double E2_base = l2_norm(u0) * l2_norm(u0);

    SpectralVelocityField u0s = rescale_initial_data(u0, lambda);
    Regularization reg_s = s.reg;
    reg_s.epsilon = s.reg.epsilon / lambda;
    const double lam2 = lambda * lambda;
    Trajectory scaled = solve(u0s, s.T / lam2, s.h / lam2, reg_s);
    const double M_scaled = scaled.max_linf;
    const double E2_scaled = l2_norm(u0s) * l2_norm(u0s);

    rep.epsM_base = s.reg.epsilon * M_base;
    rep.epsM_scaled = reg_s.epsilon * M_scaled;
    rep.TM2_base = s.T * M_base * M_base;
    rep.TM2_scaled = (s.T / lam2) * M_scaled * M_scaled;
    rep.E2M_base = E2_base * M_base;
    rep.E2M_scaled = E2_scaled * M_scaled;

    rep.worst_group_diff = std::max({rel_diff(rep.epsM_base, rep.epsM_scaled),
                                     rel_diff(rep.TM2_base, rep.TM2_scaled),
                                     rel_diff(rep.E2M_base, rep.E2M_scaled)});

    // criterion verdicts with mu1 derived from the shared step geometry
    GlobalBudget b = plan_steps(M_base, s.T, s.theta_target);
    const double mu1 = s.constants.mu1 > 0 ? s.constants.mu1 : 4.0 / (b.theta * b.theta);
    rep.crit_base =
        evaluate_criterion_global(s.reg.epsilon, M_base, s.T, s.constants.delta1, mu1);
    GlobalBudget bs = plan_steps(M_scaled, s.T / lam2, s.theta_target);
    const double mu1s = s.constants.mu1 > 0 ? s.constants.mu1 : 4.0 / (bs.theta * bs.theta);
    rep.crit_scaled =
        evaluate_criterion_global(reg_s.epsilon, M_scaled, s.T / lam2, s.constants.delta1, mu1s);

    rep.verdicts_match = rep.crit_base.pass == rep.crit_scaled.pass;
    rep.pass = rep.verdicts_match && rep.worst_group_diff <= 1e-10;
    return rep;
}

} // namespace nscert
