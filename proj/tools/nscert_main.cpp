// Command-line driver: simulate, certify-global, certify-local,
// certify-corollary, diagnose, calibrate, batch. Exit codes: 0 pass,
// 1 certification/diagnostic failure, 2 configuration error, 3 blow-up,
// 4 I/O failure.

#include <CLI11.hpp>

#include <iostream>

#include "nscert/pipeline.hpp"

using namespace nscert;

namespace {

int dispatch(const std::string& verb, const std::string& config_path,
             const std::vector<std::string>& batch_configs, const std::string& out_dir,
             long seed_override, int snapshot_every_override) {
    try {
        if (verb == "batch") {
            if (batch_configs.empty()) {
                std::cerr << "batch: no config files given\n";
                return 2;
            }
            PipelineResult r = run_batch(batch_configs, out_dir);
            std::cout << r.message;
            return r.exit_code;
        }

        RunConfig cfg = RunConfig::load(config_path);
        if (seed_override >= 0) cfg.scenario.seed = std::uint64_t(seed_override);
        if (snapshot_every_override >= 0) cfg.snapshot_every = snapshot_every_override;

        PipelineResult r;
        if (verb == "simulate") r = run_simulate(cfg, out_dir);
        else if (verb == "certify-global") r = run_certify_global(cfg, out_dir);
        else if (verb == "certify-local") r = run_certify_local(cfg, out_dir);
        else if (verb == "certify-corollary") r = run_certify_corollary(cfg, out_dir);
        else if (verb == "diagnose") r = run_diagnose(cfg, out_dir);
        else if (verb == "calibrate") r = run_calibrate(cfg, out_dir);
        else if (verb == "all") r = run_pipeline(cfg, out_dir);
        else {
            std::cerr << "unknown verb: " << verb << "\n";
            return 2;
        }
        std::cout << r.message << "\n";
        return r.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const BlowUpError& e) {
        std::cerr << "blow-up at t = " << e.last_valid_time() << "\n";
        return 3;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 4;
    } catch (const std::runtime_error& e) {
        // snapshot/report writers throw runtime errors on I/O problems
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudo-spectral Navier-Stokes solver with a posteriori regularity certification"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    long seed_override = -1;
    int snapshot_every_override = -1;
    std::vector<std::string> batch_configs;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config)
            sub->add_option("--config", config_path, "configuration file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed_override, "override the scenario seed");
        sub->add_option("--snapshot-every", snapshot_every_override,
                        "write a state snapshot every K steps");
    };

    for (const char* verb : {"simulate", "certify-global", "certify-local", "certify-corollary",
                             "diagnose", "calibrate", "all"})
        add_common(app.add_subcommand(verb), true);

    CLI::App* batch = app.add_subcommand("batch", "run several configs");
    batch->add_option("configs", batch_configs, "configuration files")->required();
    add_common(batch, false);

    CLI11_PARSE(app, argc, argv);
    const std::string verb = app.get_subcommands().front()->get_name();
    return dispatch(verb, config_path, batch_configs, out_dir, seed_override,
                    snapshot_every_override);
}
