#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "nscert/constants.hpp"
#include "nscert/diagnostics.hpp"
#include "nscert/local_cert.hpp"
#include "nscert/scenario.hpp"
#include "nscert/solver.hpp"

namespace nscert {

// Raised on missing or malformed configuration; carries the offending key.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& key, const std::string& what)
        : std::runtime_error("config key '" + key + "': " + what), key_(key) {}
    const std::string& key() const { return key_; }

  private:
    std::string key_;
};

// Flat dotted-key text format, one `key = value` per line, '#' comments.
struct RunConfig {
    int n = 0;
    double L = 2 * M_PI;
    double T = 0;
    double h = 0;
    double ceiling = 1e6;
    int store_every = 1;
    int norms_every = 1;
    int snapshot_every = 0; // 0 = no snapshots

    Regularization reg = Regularization::none();
    Scenario scenario;

    double theta_global = 0.1; // Theorem-1 step factor target
    double M_override = 0;     // 0 = measure from the run

    double kappa = 0.25; // Theorem-2 window geometry
    double theta_local = 0.025;
    long N_local = 0; // 0 = smallest admissible integer
    int y_stride = 2;
    int probe_stride = 8;
    int local_substeps = 1;
    int twin_ref_factor = 2;
    bool twin = false;

    double decay_window_min = 1.0;
    double decay_window_max = 2.0;

    LocalExponents exponents;
    CertificationConstants constants;
    DiagnosticConstants diag;

    static RunConfig from_text(const std::string& text);
    static RunConfig load(const std::string& path);
};

// raw key-value view, exposed for tooling and tests
std::map<std::string, std::string> parse_key_values(const std::string& text);

} // namespace nscert
