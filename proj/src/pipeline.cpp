#include "nscert/pipeline.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "nscert/snapshot.hpp"

namespace nscert {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir);
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed for " + path);
}

json constants_json(const RunConfig& cfg) {
    const auto& c = cfg.constants;
    const auto& e = cfg.exponents;
    const auto& d = cfg.diag;
    json ex = {{"q1", std::isinf(e.q1) ? json("inf") : json(e.q1)},
               {"q2", std::isinf(e.q2) ? json("inf") : json(e.q2)},
               {"m_energy", e.m_energy},
               {"m_epsreg", e.m_epsreg},
               {"q1_surrogate", e.q1_surrogate},
               {"q2_surrogate", e.q2_surrogate},
               {"nu", e.nu},
               {"sigma", e.sigma},
               {"lambda", e.lambda}};
    return json{{"C", c.C},
                {"C0", c.C0},
                {"C1", c.C1},
                {"C2", c.C2},
                {"delta1", c.delta1},
                {"mu1", c.mu1},
                {"delta2", c.delta2},
                {"mu2", c.mu2},
                {"eps0", c.eps0},
                {"Cbar", c.Cbar},
                {"Ctilde", c.Ctilde_global},
                {"exponents", ex},
                {"diagnostic", {{"gradient_C", d.gradient_bound_C},
                                {"duhamel_C", d.duhamel_C},
                                {"mollification_C", d.mollification_C},
                                {"decay_C", d.decay_C},
                                {"twin_C", d.twin_envelope_C},
                                {"energy_slack", d.energy_slack}}}};
}

json inputs_json(const RunConfig& cfg, double M) {
    return json{{"scenario", cfg.scenario.id}, {"n", cfg.n},       {"L", cfg.L},
                {"T", cfg.T},                  {"h", cfg.h},       {"epsilon", cfg.reg.epsilon},
                {"reg",
                 cfg.reg.kind == Regularization::Kind::None
                     ? "none"
                     : (cfg.reg.kind == Regularization::Kind::Leray ? "leray" : "projection")},
                {"M", M}};
}

json ledger_json(const GrowthLedger& led) {
    json entries = json::array();
    for (const auto& e : led.entries)
        entries.push_back(json{{"j", e.index},
                               {"t", e.t},
                               {"bound", e.bound},
                               {"pass", e.pass},
                               {"failed", e.failed}});
    return json{{"alpha", led.alpha},
                {"beta", led.beta},
                {"gamma", led.gamma},
                {"failed_conditions", led.failed_conditions},
                {"entries", entries},
                {"conclusion_bound", led.conclusion_bound},
                {"pass", led.pass}};
}

json local_ledger_json(const LocalLedger& led) {
    json windows = json::array();
    for (const auto& w : led.windows)
        windows.push_back(json{{"k", w.k},
                               {"t_k", w.t_k},
                               {"e_value", w.e_value},
                               {"bound", w.bound},
                               {"case", std::string(1, w.case_id)},
                               {"handoff", w.handoff},
                               {"handoff_ok", w.handoff_ok},
                               {"pass", w.pass},
                               {"y_max", w.y_max},
                               {"failed", w.failed}});
    json eps = json::array();
    for (const auto& er : led.eps_reg)
        eps.push_back(json{{"k", er.k},
                           {"t_top", er.t_top},
                           {"z0", er.z0},
                           {"terms", er.terms},
                           {"caps", er.caps},
                           {"threshold", er.per_term_threshold},
                           {"pass", er.pass}});
    return json{{"alpha", led.alpha},
                {"beta", led.beta},
                {"gamma", led.gamma},
                {"N", led.plan.N},
                {"K", led.plan.K},
                {"theta", led.plan.theta},
                {"tau", led.plan.tau},
                {"r", led.plan.r},
                {"cadence", led.plan.cadence},
                {"failed_conditions", led.failed_conditions},
                {"windows", windows},
                {"eps_reg", eps},
                {"measured_kappa0", led.measured_kappas.kappa0},
                {"measured_kappa2", led.measured_kappas.kappa2},
                {"conclusion_bound", led.conclusion_bound},
                {"pass", led.pass}};
}

json check_json(const BoundCheckRecord& rec) {
    return json{{"name", rec.name},
                {"C", rec.C},
                {"samples", rec.times.size()},
                {"worst_ratio", rec.worst_ratio},
                {"pass", rec.pass}};
}

struct SimulationArtifacts {
    Trajectory traj;
    SpectralVelocityField u0;
    double M = 0; // override or measured
};

SimulationArtifacts simulate_core(const RunConfig& cfg, const std::string& out_dir,
                                  bool write_artifacts) {
    if (!(cfg.h > 0)) throw ConfigError("time.h", "required for this verb");
    Grid grid(cfg.n, cfg.L);
    SimulationArtifacts art;
    art.u0 = generate_initial_data(cfg.scenario, grid);
    SolveOptions opt;
    opt.ceiling = cfg.ceiling;
    opt.store_every = cfg.store_every;
    opt.norms_every = cfg.norms_every;
    art.traj = solve(art.u0, cfg.T, cfg.h, cfg.reg, opt);
    art.M = cfg.M_override > 0 ? cfg.M_override : art.traj.max_linf;
    if (write_artifacts) {
        art.traj.export_norms_csv(out_dir + "/norms.csv");
        if (cfg.snapshot_every > 0) {
            for (std::size_t i = 0; i < art.traj.states.size(); ++i) {
                const long step = std::lround(art.traj.state_times[i] / cfg.h);
                if (step % cfg.snapshot_every != 0) continue;
                char name[64];
                std::snprintf(name, sizeof(name), "/state_%06ld.nscf", step);
                write_snapshot(out_dir + name, art.traj.states[i]);
            }
        }
    }
    return art;
}

} // namespace

PipelineResult run_simulate(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    try {
        simulate_core(cfg, out_dir, true);
    } catch (const BlowUpError& e) {
        return {3, "blow-up at t = " + std::to_string(e.last_valid_time())};
    }
    return {0, "simulation complete"};
}

PipelineResult run_certify_global(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    SimulationArtifacts art;
    try {
        art = simulate_core(cfg, out_dir, true);
    } catch (const BlowUpError& e) {
        return {3, "blow-up at t = " + std::to_string(e.last_valid_time())};
    }

    GlobalBudget budget = plan_steps(art.M, cfg.T, cfg.theta_global);
    const double mu1 =
        cfg.constants.mu1 > 0 ? cfg.constants.mu1 : 4.0 / (budget.theta * budget.theta);
    CriterionResult crit = evaluate_criterion_global(cfg.reg.epsilon, art.M, cfg.T,
                                                     cfg.constants.delta1, mu1);
    GrowthLedger led = run_global_induction(budget, cfg.reg.epsilon, art.M, cfg.constants.C);

    json rep{{"criterion", "global"},
             {"inputs", inputs_json(cfg, art.M)},
             {"constants", constants_json(cfg)},
             {"mu1_effective", mu1},
             {"budget",
              {{"theta", budget.theta}, {"tau", budget.tau}, {"K", budget.K}}},
             {"threshold", crit.threshold},
             {"epsilon", crit.epsilon},
             {"ratio", crit.ratio},
             {"pass", crit.pass && led.pass},
             {"criterion_pass", crit.pass},
             {"ledger", ledger_json(led)},
             {"conclusion_bound", led.conclusion_bound}};
    write_json(out_dir + "/global_report.json", rep);

    const bool ok = crit.pass && led.pass;
    return {ok ? 0 : 1, ok ? "global certification passed" : "global certification failed"};
}

PipelineResult run_certify_local(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    Grid grid(cfg.n, cfg.L);
    SpectralVelocityField u0 = generate_initial_data(cfg.scenario, grid);

    LocalCertParams params;
    params.epsilon = cfg.reg.epsilon;
    params.kappa = cfg.kappa;
    params.theta = cfg.theta_local;
    params.N = cfg.N_local;
    params.T = cfg.T;
    params.exponents = cfg.exponents;
    params.constants = cfg.constants;
    params.y_stride = cfg.y_stride;
    params.probe_stride = cfg.probe_stride;

    SolveOptions opt;
    opt.ceiling = cfg.ceiling;

    double M = cfg.M_override;
    try {
        if (M <= 0) {
            // preliminary coarse-only pass to measure the sup bound
            params.M = 1.0;
            WindowPlan probe = plan_local_windows(params);
            SolveOptions prelim = opt;
            prelim.store_every = std::max<long>(1, probe.K);
            Trajectory t = solve(u0, cfg.T, probe.cadence / cfg.local_substeps, cfg.reg, prelim);
            M = t.max_linf;
        }
        params.M = M;
        WindowPlan plan = plan_local_windows(params);

        TwinSolverStream stream(u0, cfg.reg, plan.cadence, plan.K, cfg.local_substeps,
                                cfg.twin_ref_factor, opt);
        LocalLedger led = run_local_induction(stream, params);
        if (stream.measured_max_linf() > M * (1.0 + 1e-9))
            led.failed_conditions.push_back("M bounds the regularized run"), led.pass = false;

        json rep{{"criterion", "local"},
                 {"inputs", inputs_json(cfg, M)},
                 {"constants", constants_json(cfg)},
                 {"ledger", local_ledger_json(led)},
                 {"pass", led.pass}};
        write_json(out_dir + "/local_report.json", rep);
        return {led.pass ? 0 : 1,
                led.pass ? "local certification passed" : "local certification failed"};
    } catch (const BlowUpError& e) {
        return {3, "blow-up at t = " + std::to_string(e.last_valid_time())};
    }
}

PipelineResult run_certify_corollary(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    SimulationArtifacts art;
    try {
        art = simulate_core(cfg, out_dir, true);
    } catch (const BlowUpError& e) {
        return {3, "blow-up at t = " + std::to_string(e.last_valid_time())};
    }

    const double l2 = l2_norm(art.u0);
    const double T0 = evaluate_T0(l2, cfg.constants.C);
    CorollaryResult crit =
        evaluate_criterion_corollary(cfg.reg.epsilon, art.M, l2, cfg.constants.C1,
                                     cfg.constants.C2, cfg.constants.Ctilde_global);

    json rep{{"criterion", "corollary"},
             {"inputs", inputs_json(cfg, art.M)},
             {"constants", constants_json(cfg)},
             {"l2_norm", l2},
             {"T0", T0},
             {"threshold", crit.threshold},
             {"epsilon", crit.epsilon},
             {"ratio", crit.ratio},
             {"pass", crit.pass},
             {"conclusion_bound", crit.conclusion_bound}};
    write_json(out_dir + "/corollary_report.json", rep);
    return {crit.pass ? 0 : 1,
            crit.pass ? "corollary certification passed" : "corollary certification failed"};
}

PipelineResult run_diagnose(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    SimulationArtifacts art;
    try {
        art = simulate_core(cfg, out_dir, true);
    } catch (const BlowUpError& e) {
        return {3, "blow-up at t = " + std::to_string(e.last_valid_time())};
    }

    std::vector<BoundCheckRecord> checks;
    checks.push_back(energy_monotonicity_check(art.traj, cfg.diag.energy_slack));
    checks.push_back(gradient_bound_check(art.traj, art.M, cfg.diag.gradient_bound_C));

    if (cfg.reg.kind == Regularization::Kind::Leray) {
        Mollifier m(art.traj.grid, cfg.reg.epsilon);
        checks.push_back(mollification_bound_check(art.traj, m, cfg.diag.mollification_C));
    }
    if (cfg.reg.kind != Regularization::Kind::None) {
        Integrator integ(art.traj.grid, cfg.reg);
        TensorSeries gs;
        for (std::size_t i = 0; i < art.traj.states.size(); ++i) {
            gs.times.push_back(art.traj.state_times[i]);
            gs.fields.push_back(integ.error_tensor(art.traj.states[i]));
        }
        checks.push_back(duhamel_bound_check(gs, cfg.reg.epsilon, art.M, cfg.diag.duhamel_C));
    }
    if (cfg.reg.kind == Regularization::Kind::None && cfg.T >= cfg.decay_window_min) {
        checks.push_back(decay_check(art.traj, art.traj.norms.front().l2, cfg.diag.decay_C,
                                     cfg.decay_window_min,
                                     std::min(cfg.decay_window_max, cfg.T)));
    }

    json tw;
    bool twin_pass = true;
    if (cfg.twin && cfg.reg.kind != Regularization::Kind::None) {
        SolveOptions ref_opt;
        ref_opt.ceiling = cfg.ceiling;
        ref_opt.store_every = 4 * cfg.store_every;
        ref_opt.norms_every = 4 * cfg.norms_every;
        Grid fine(cfg.n * cfg.twin_ref_factor, cfg.L);
        Trajectory ref;
        try {
            ref = solve(prolong_to_grid(art.u0, fine), cfg.T, cfg.h / 4.0,
                        Regularization::none(), ref_opt);
        } catch (const BlowUpError& e) {
            return {3, "reference blow-up at t = " + std::to_string(e.last_valid_time())};
        }
        GlobalBudget budget = plan_steps(art.M, cfg.T, cfg.theta_global);
        TwinErrorResult terr = measure_twin_error(art.traj, ref, cfg.reg.epsilon, art.M,
                                                  cfg.diag.twin_envelope_C, budget.tau);
        twin_pass = terr.within_envelope;
        std::ofstream csv(out_dir + "/twin_error.csv");
        csv << "t,error,envelope\n";
        csv.precision(17);
        for (std::size_t i = 0; i < terr.times.size(); ++i)
            csv << terr.times[i] << "," << terr.error_linf[i] << "," << terr.envelope[i] << "\n";
        tw = json{{"within_envelope", terr.within_envelope},
                  {"fitted_rate", terr.fitted_rate},
                  {"envelope_rate", terr.envelope_rate}};
    }

    json arr = json::array();
    bool all_pass = twin_pass;
    for (const auto& rec : checks) {
        rec.export_csv(out_dir + "/check_" + rec.name + ".csv");
        arr.push_back(check_json(rec));
        all_pass = all_pass && rec.pass;
    }
    json rep{{"checks", arr}, {"constants", constants_json(cfg)}, {"pass", all_pass}};
    if (!tw.is_null()) rep["twin_error"] = tw;
    write_json(out_dir + "/diagnostics.json", rep);
    return {all_pass ? 0 : 1, all_pass ? "diagnostics passed" : "diagnostics failed"};
}

std::vector<std::pair<std::string, RunConfig>> scenario_registry(int n, double h) {
    auto base = [&](const std::string& id, const std::string& reg, double eps, double T) {
        std::string text = "scenario.id = " + id + "\ngrid.n = " + std::to_string(n) +
                           "\ntime.T = " + std::to_string(T) + "\ntime.h = " + std::to_string(h) +
                           "\nreg.kind = " + reg + "\n";
        if (reg != "none") text += "reg.epsilon = " + std::to_string(eps) + "\n";
        text += "scenario.seed = 7\nscenario.kmax = 3\nsolver.store_every = 10\n";
        return RunConfig::from_text(text);
    };
    std::vector<std::pair<std::string, RunConfig>> reg;
    reg.emplace_back("taylor-green/none", base("taylor-green", "none", 0, 2.0));
    reg.emplace_back("taylor-green/leray", base("taylor-green", "leray", 0.2, 0.1));
    reg.emplace_back("taylor-green-3d/leray", base("taylor-green-3d", "leray", 0.2, 0.1));
    reg.emplace_back("random-band/leray", base("random-band", "leray", 0.2, 0.1));
    reg.emplace_back("random-band/projection", base("random-band", "projection", 0.6, 0.1));
    reg.emplace_back("single-mode/none", base("single-mode", "none", 0, 0.1));
    return reg;
}

PipelineResult run_calibrate(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    double grad_max = 0, duh_max = 0, moll_max = 0, decay_max = 0;

    for (auto& [name, rc] : scenario_registry(cfg.n, cfg.h > 0 ? cfg.h : 2e-3)) {
        SimulationArtifacts art = simulate_core(rc, out_dir, false);
        grad_max = std::max(grad_max, gradient_bound_check(art.traj, art.M, 1.0).worst_ratio);
        if (rc.reg.kind == Regularization::Kind::Leray) {
            Mollifier m(art.traj.grid, rc.reg.epsilon);
            moll_max =
                std::max(moll_max, mollification_bound_check(art.traj, m, 1.0).worst_ratio);
        }
        if (rc.reg.kind != Regularization::Kind::None) {
            Integrator integ(art.traj.grid, rc.reg);
            TensorSeries gs;
            for (std::size_t i = 0; i < art.traj.states.size(); ++i) {
                gs.times.push_back(art.traj.state_times[i]);
                gs.fields.push_back(integ.error_tensor(art.traj.states[i]));
            }
            duh_max = std::max(duh_max,
                               duhamel_bound_check(gs, rc.reg.epsilon, art.M, 1.0).worst_ratio);
        }
        if (rc.reg.kind == Regularization::Kind::None && rc.T >= 1.0) {
            decay_max = std::max(
                decay_max,
                decay_check(art.traj, art.traj.norms.front().l2, 1.0, 1.0, rc.T).worst_ratio);
        }
    }

    const double margin = 1.05;
    json rep{{"suggested",
              {{"diag.gradient_C", grad_max * margin},
               {"diag.duhamel_C", duh_max * margin},
               {"diag.mollification_C", moll_max * margin},
               {"diag.decay_C", decay_max * margin}}},
             {"measured_worst_ratios",
              {{"gradient", grad_max},
               {"duhamel", duh_max},
               {"mollification", moll_max},
               {"decay", decay_max}}}};
    write_json(out_dir + "/calibration.json", rep);
    return {0, "calibration written"};
}

PipelineResult run_batch(const std::vector<std::string>& config_paths,
                         const std::string& out_dir) {
    ensure_dir(out_dir);
    int worst = 0;
    std::string msg;
    for (const auto& path : config_paths) {
        RunConfig cfg;
        try {
            cfg = RunConfig::load(path);
        } catch (const ConfigError& e) {
            return {2, e.what()};
        }
        const std::string stem = fs::path(path).stem().string();
        PipelineResult r = run_pipeline(cfg, out_dir + "/" + stem);
        msg += stem + ": " + r.message + "\n";
        worst = std::max(worst, r.exit_code);
    }
    return {worst, msg};
}

PipelineResult run_pipeline(const RunConfig& cfg, const std::string& out_dir) {
    PipelineResult sim = run_simulate(cfg, out_dir);
    if (sim.exit_code != 0) return sim;
    int worst = 0;
    std::string msg = sim.message + "\n";
    for (auto verb : {run_certify_global, run_certify_corollary, run_certify_local, run_diagnose}) {
        PipelineResult r = verb(cfg, out_dir);
        msg += r.message + "\n";
        if (r.exit_code >= 2) return {r.exit_code, msg};
        worst = std::max(worst, r.exit_code);
    }
    return {worst, msg};
}

} // namespace nscert
