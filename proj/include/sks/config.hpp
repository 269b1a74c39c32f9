#pragma once

// Flat `key = value` run configuration with CLI override precedence. Every
// run is reproducible from (config file + overrides + seed); the resolved
// configuration is echoed into every output header.

#include <cstdint>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sks/dynamics.hpp"
#include "sks/field.hpp"
#include "sks/io.hpp"
#include "sks/noise.hpp"
#include "sks/version.hpp"

namespace sks {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    double nu = 1.0;
    double L = 2.0 * std::numbers::pi;
    double gamma = 0.5;
    double shift_a = 0.5;  // default 1/(2 nu)
    bool shift_a_set = false;
    bool shift_iso = false;
    bool uso_profile = false;
    int K = 64;
    double dt = 1e-3;
    double T = 1.0;
    double burn_in = 1.0;
    double cutoff_R = 0.0;
    std::uint64_t seed = 0;
    int record_stride = 1;
    int modes_out = 4;          // trajectory CSV mode columns
    std::string scheme = "direct-u";
    double alpha = 0.0;         // weight for check / occupation diagnostics
    double mix_tolerance = 0.05;
    std::uint64_t samples = 10000;  // gradient Monte-Carlo size
    int direction_mode = 1;         // gradient direction h = e_j
    int phi_mode = 1;               // gradient observable phi = <u, e_j>
    int threads = 1;

    SimConfig sim() const {
        SimConfig c;
        c.K = K;
        c.dt = dt;
        c.T = T;
        c.scheme = (scheme == "v-plus-z") ? Scheme::v_plus_z : Scheme::direct_u;
        c.cutoff_R = cutoff_R;
        c.seed = seed;
        c.record_stride = record_stride;
        return c;
    }

    DomainSpec domain() const { return DomainSpec(L, nu, shift_a); }

    NoiseOperator noise(const WavenumberTable& tab) const {
        return uso_profile ? NoiseOperator::uso_profile(tab, shift_iso)
                           : NoiseOperator::power_law(gamma, tab, shift_iso);
    }

    // Echoed into output headers; deliberately excludes execution details
    // (threads, output path) so identical runs produce identical bytes.
    void echo(std::ostream& os) const {
        os << "# sks version=" << version_string << "\n";
        os << "# nu=" << format_g17(nu) << " L=" << format_g17(L) << " gamma=" << format_g17(gamma)
           << " shift_a=" << format_g17(shift_a) << " shift_iso=" << (shift_iso ? 1 : 0)
           << " uso_profile=" << (uso_profile ? 1 : 0) << "\n";
        os << "# K=" << K << " dt=" << format_g17(dt) << " T=" << format_g17(T)
           << " burn_in=" << format_g17(burn_in) << " cutoff_R=" << format_g17(cutoff_R)
           << " seed=" << seed << " record_stride=" << record_stride << " scheme=" << scheme << "\n";
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline bool parse_bool(const std::string& v, const std::string& where) {
    if (v == "1" || v == "true" || v == "on") return true;
    if (v == "0" || v == "false" || v == "off") return false;
    throw ConfigError(where + ": expected boolean, got '" + v + "'");
}

inline void apply_kv(RunConfig& cfg, const std::string& key, const std::string& value,
                     const std::string& where) {
    try {
        if (key == "nu") cfg.nu = std::stod(value);
        else if (key == "L") cfg.L = std::stod(value);
        else if (key == "gamma") cfg.gamma = std::stod(value);
        else if (key == "shift_a") { cfg.shift_a = std::stod(value); cfg.shift_a_set = true; }
        else if (key == "shift_iso") cfg.shift_iso = parse_bool(value, where);
        else if (key == "uso_profile") cfg.uso_profile = parse_bool(value, where);
        else if (key == "K") cfg.K = std::stoi(value);
        else if (key == "dt") cfg.dt = std::stod(value);
        else if (key == "T") cfg.T = std::stod(value);
        else if (key == "burn_in") cfg.burn_in = std::stod(value);
        else if (key == "cutoff_R") cfg.cutoff_R = std::stod(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "record_stride") cfg.record_stride = std::stoi(value);
        else if (key == "modes_out") cfg.modes_out = std::stoi(value);
        else if (key == "scheme") cfg.scheme = value;
        else if (key == "alpha") cfg.alpha = std::stod(value);
        else if (key == "mix_tolerance") cfg.mix_tolerance = std::stod(value);
        else if (key == "samples") cfg.samples = std::stoull(value);
        else if (key == "direction_mode") cfg.direction_mode = std::stoi(value);
        else if (key == "phi_mode") cfg.phi_mode = std::stoi(value);
        else if (key == "threads") cfg.threads = std::stoi(value);
        else throw ConfigError(where + ": unknown key '" + key + "'");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError(where + ": bad value '" + value + "' for key '" + key + "'");
    }
}

}  // namespace detail

inline void validate(const RunConfig& cfg) {
    if (!(cfg.nu > 0.0)) throw ConfigError("config: nu must be > 0");
    if (!(cfg.L > 0.0)) throw ConfigError("config: L must be > 0");
    if (cfg.K < 1) throw ConfigError("config: K must be >= 1");
    if (!(cfg.dt > 0.0)) throw ConfigError("config: dt must be > 0");
    if (!(cfg.T >= cfg.dt)) throw ConfigError("config: T must be >= dt");
    if (cfg.burn_in < 0.0) throw ConfigError("config: burn_in must be >= 0");
    if (cfg.cutoff_R < 0.0) throw ConfigError("config: cutoff_R must be >= 0");
    if (cfg.scheme != "direct-u" && cfg.scheme != "v-plus-z")
        throw ConfigError("config: scheme must be direct-u or v-plus-z");
    if (cfg.record_stride < 1) throw ConfigError("config: record_stride must be >= 1");
    if (cfg.threads < 1) throw ConfigError("config: threads must be >= 1");
    if (cfg.modes_out < 0 || cfg.modes_out > 2 * cfg.K)
        throw ConfigError("config: modes_out out of range");
    if (cfg.direction_mode < 1 || cfg.direction_mode > 2 * cfg.K)
        throw ConfigError("config: direction_mode out of range");
    if (cfg.phi_mode < 1 || cfg.phi_mode > 2 * cfg.K) throw ConfigError("config: phi_mode out of range");
}

// File contents first, then CLI overrides (flags win).
inline RunConfig parse_config(std::istream& file,
                              const std::vector<std::pair<std::string, std::string>>& overrides) {
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(file, line)) {
        ++lineno;
        const std::string stripped = detail::trim(line.substr(0, line.find('#')));
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(stripped.substr(0, eq));
        const std::string value = detail::trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        detail::apply_kv(cfg, key, value, "config line " + std::to_string(lineno));
    }
    for (const auto& [key, value] : overrides) detail::apply_kv(cfg, key, value, "flag --" + key);
    if (!cfg.shift_a_set) cfg.shift_a = 1.0 / (2.0 * cfg.nu);
    validate(cfg);
    return cfg;
}

inline RunConfig parse_config(const std::string& file_contents,
                              const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::istringstream is(file_contents);
    return parse_config(is, overrides);
}

}  // namespace sks
