#include "nscert/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace nscert {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

class KV {
  public:
    explicit KV(std::map<std::string, std::string> m) : m_(std::move(m)) {}

    const std::string& require(const std::string& key) const {
        auto it = m_.find(key);
        if (it == m_.end()) throw ConfigError(key, "missing");
        return it->second;
    }
    bool has(const std::string& key) const { return m_.count(key) > 0; }

    double number(const std::string& key) const { return to_number(key, require(key)); }
    double number_or(const std::string& key, double dflt) const {
        auto it = m_.find(key);
        return it == m_.end() ? dflt : to_number(key, it->second);
    }
    // accepts "inf" for the exponent slots
    double number_or_inf(const std::string& key, double dflt) const {
        auto it = m_.find(key);
        if (it == m_.end()) return dflt;
        if (it->second == "inf" || it->second == "infinity")
            return std::numeric_limits<double>::infinity();
        return to_number(key, it->second);
    }
    long integer_or(const std::string& key, long dflt) const {
        const double v = number_or(key, double(dflt));
        if (v != std::floor(v)) throw ConfigError(key, "expected an integer");
        return long(v);
    }
    bool flag_or(const std::string& key, bool dflt) const {
        auto it = m_.find(key);
        if (it == m_.end()) return dflt;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw ConfigError(key, "expected true/false");
    }
    std::string text_or(const std::string& key, const std::string& dflt) const {
        auto it = m_.find(key);
        return it == m_.end() ? dflt : it->second;
    }

  private:
    static double to_number(const std::string& key, const std::string& v) {
        std::size_t pos = 0;
        double out = 0;
        try {
            out = std::stod(v, &pos);
        } catch (const std::exception&) {
            throw ConfigError(key, "not a number: " + v);
        }
        if (pos != v.size()) throw ConfigError(key, "trailing characters in: " + v);
        return out;
    }

    std::map<std::string, std::string> m_;
};

} // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno), "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
        out[key] = value;
    }
    return out;
}

RunConfig RunConfig::from_text(const std::string& text) {
    KV kv(parse_key_values(text));
    RunConfig c;

    c.n = int(kv.integer_or("grid.n", 0));
    if (c.n == 0) throw ConfigError("grid.n", "missing");
    c.L = kv.number_or("grid.L", 2 * M_PI);
    c.T = kv.number("time.T");
    c.h = kv.number_or("time.h", 0.0);
    c.ceiling = kv.number_or("solver.ceiling", 1e6);
    c.store_every = int(kv.integer_or("solver.store_every", 1));
    c.norms_every = int(kv.integer_or("solver.norms_every", 1));
    c.snapshot_every = int(kv.integer_or("output.snapshot_every", 0));

    const std::string kind = kv.text_or("reg.kind", "none");
    if (kind == "none") {
        c.reg = Regularization::none();
    } else if (kind == "leray") {
        c.reg = Regularization::leray(kv.number("reg.epsilon"));
    } else if (kind == "projection") {
        c.reg = Regularization::projection(kv.number("reg.epsilon"));
    } else {
        throw ConfigError("reg.kind", "expected none|leray|projection");
    }

    try {
        c.scenario = Scenario::parse(kv.require("scenario.id"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("scenario.id", e.what());
    }
    c.scenario.seed = std::uint64_t(kv.integer_or("scenario.seed", 1));
    c.scenario.kmax = int(kv.integer_or("scenario.kmax", 4));
    c.scenario.amplitude = kv.number_or("scenario.amplitude", 1.0);

    c.theta_global = kv.number_or("certify.theta", 0.1);
    c.M_override = kv.number_or("certify.M", 0.0);

    c.kappa = kv.number_or("local.kappa", 0.25);
    c.theta_local = kv.number_or("local.theta", 0.025);
    c.N_local = kv.integer_or("local.N", 0);
    c.y_stride = int(kv.integer_or("local.stride", 2));
    c.probe_stride = int(kv.integer_or("local.probe_stride", 8));
    c.local_substeps = int(kv.integer_or("local.substeps", 1));
    c.twin_ref_factor = int(kv.integer_or("twin.ref_factor", 2));
    c.twin = kv.flag_or("twin.enabled", false);

    c.decay_window_min = kv.number_or("diag.decay_t_min", 1.0);
    c.decay_window_max = kv.number_or("diag.decay_t_max", 2.0);

    c.exponents.q1 = kv.number_or_inf("exponents.q1", c.exponents.q1);
    c.exponents.q2 = kv.number_or_inf("exponents.q2", c.exponents.q2);
    c.exponents.m_energy = kv.number_or("exponents.m_energy", c.exponents.m_energy);
    c.exponents.m_epsreg = kv.number_or("exponents.m_epsreg", c.exponents.m_epsreg);
    c.exponents.q1_surrogate = kv.number_or("exponents.q1_surrogate", c.exponents.q1_surrogate);
    c.exponents.q2_surrogate = kv.number_or("exponents.q2_surrogate", c.exponents.q2_surrogate);
    for (int i = 0; i < 3; ++i) {
        const std::string sfx = std::to_string(i + 1);
        c.exponents.nu[i] = kv.number_or("exponents.nu" + sfx, c.exponents.nu[i]);
        c.exponents.sigma[i] = kv.number_or("exponents.sigma" + sfx, c.exponents.sigma[i]);
        c.exponents.lambda[i] = kv.number_or("exponents.lambda" + sfx, c.exponents.lambda[i]);
    }

    c.constants.C = kv.number_or("constants.C", c.constants.C);
    c.constants.C0 = kv.number_or("constants.C0", c.constants.C0);
    c.constants.C1 = kv.number_or("constants.C1", c.constants.C1);
    c.constants.C2 = kv.number_or("constants.C2", c.constants.C2);
    c.constants.delta1 = kv.number_or("constants.delta1", c.constants.delta1);
    c.constants.mu1 = kv.number_or("constants.mu1", c.constants.mu1);
    c.constants.delta2 = kv.number_or("constants.delta2", c.constants.delta2);
    c.constants.mu2 = kv.number_or("constants.mu2", c.constants.mu2);
    c.constants.eps0 = kv.number_or("constants.eps0", c.constants.eps0);
    c.constants.Cbar = kv.number_or("constants.Cbar", c.constants.Cbar);
    c.constants.Ctilde_global = kv.number_or("constants.Ctilde", c.constants.Ctilde_global);

    c.diag.gradient_bound_C = kv.number_or("diag.gradient_C", c.diag.gradient_bound_C);
    c.diag.duhamel_C = kv.number_or("diag.duhamel_C", c.diag.duhamel_C);
    c.diag.mollification_C = kv.number_or("diag.mollification_C", c.diag.mollification_C);
    c.diag.decay_C = kv.number_or("diag.decay_C", c.diag.decay_C);
    c.diag.twin_envelope_C = kv.number_or("diag.twin_C", c.diag.twin_envelope_C);
    c.diag.energy_slack = kv.number_or("diag.energy_slack", c.diag.energy_slack);

    // validate against module preconditions
    try {
        Grid probe(c.n, c.L);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("grid.n", e.what());
    }
    if (!(c.T > 0)) throw ConfigError("time.T", "must be positive");
    if (c.h < 0) throw ConfigError("time.h", "must be nonnegative");
    if (c.reg.kind != Regularization::Kind::None && !(c.reg.epsilon > 0))
        throw ConfigError("reg.epsilon", "must be positive");
    try {
        c.exponents.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("exponents", e.what());
    }
    if (!(c.kappa > 0) || c.kappa > 1) throw ConfigError("local.kappa", "must lie in (0, 1]");
    if (!(c.theta_local > 0) || c.theta_local > 1)
        throw ConfigError("local.theta", "must lie in (0, 1]");
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

} // namespace nscert
