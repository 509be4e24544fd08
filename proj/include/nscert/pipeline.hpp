#pragma once

#include <string>
#include <vector>

#include "nscert/config.hpp"

namespace nscert {

// Exit codes shared by every verb:
//   0 success (all requested certifications pass)
//   1 a certification or diagnostic verdict failed
//   2 configuration error
//   3 solver blow-up (message carries the last valid time)
//   4 I/O failure
struct PipelineResult {
    int exit_code = 0;
    std::string message;
};

PipelineResult run_simulate(const RunConfig& cfg, const std::string& out_dir);
PipelineResult run_certify_global(const RunConfig& cfg, const std::string& out_dir);
PipelineResult run_certify_local(const RunConfig& cfg, const std::string& out_dir);
PipelineResult run_certify_corollary(const RunConfig& cfg, const std::string& out_dir);
PipelineResult run_diagnose(const RunConfig& cfg, const std::string& out_dir);
PipelineResult run_calibrate(const RunConfig& cfg, const std::string& out_dir);
PipelineResult run_batch(const std::vector<std::string>& config_paths, const std::string& out_dir);

// simulate + every certification + diagnostics; exit 0 iff everything passes
PipelineResult run_pipeline(const RunConfig& cfg, const std::string& out_dir);

// the reference scenario set used by calibrate and the diagnostics gate
std::vector<std::pair<std::string, RunConfig>> scenario_registry(int n, double h);

} // namespace nscert
