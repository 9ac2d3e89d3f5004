#include "sngrav/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sngrav/constants.hpp"
#include "sngrav/errors.hpp"

namespace sngrav {

namespace {

const std::vector<std::string> kPhysical = {"M",           "omega_m_hz", "Q_m",        "omega_snA_hz",
                                            "omega_snB_hz", "Lambda_hz",  "theta_plus", "theta_minus"};

const std::map<std::string, std::string>& optional_defaults() {
    static const std::map<std::string, std::string> d = {
        {"squeeze_r", "0"},         {"squeeze_phi", "0"},  {"temperature", "0"},
        {"prescription", "classical_thermal"},             {"laser_force_psd", "0"},
        {"f_min_hz", "1e-4"},       {"f_max_hz", "1"},     {"n_points", "2000"},
        {"grid", "log"},            {"seed", "1"},         {"exclusion_window", "off"},
        {"approximation", "off"},   {"material_A", "silicon"}, {"material_B", "osmium"},
        {"preset", "none"},
    };
    return d;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const std::map<std::string, std::string>& table1_values() {
    static const std::map<std::string, std::string> t = {
        {"M", "1"},
        {"omega_m_hz", "6e-3"},
        {"Q_m", "1e7"},
        {"omega_snA_hz", "7.8e-3"},
        {"omega_snB_hz", "77e-3"},
        {"Lambda_hz", "1"},
        {"theta_plus", "-0.14"},
        {"theta_minus", "-0.14"},
        {"squeeze_r", fmt(0.5 * std::log(10.0))},
        {"squeeze_phi", "0"},
        {"temperature", "1"},
        {"prescription", "classical_thermal"},
    };
    return t;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || v.empty() || !std::isfinite(x))
        throw DomainError("config key '" + key + "': '" + v + "' is not a finite number");
    return x;
}

bool parse_flag(const std::string& key, const std::string& v) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw DomainError("config key '" + key + "': expected on/off, got '" + v + "'");
}

std::string join_keys() {
    std::string out;
    for (const auto& k : config_keys()) out += (out.empty() ? "" : ", ") + k;
    return out;
}

// Checks one value and returns its canonical spelling.
std::string canonical(const std::string& key, const std::string& v) {
    if (key == "prescription") {
        const auto p = prescription_from_string(v);
        if (!p) throw DomainError("config key 'prescription': expected qrpn_only, classical_thermal or quantum_thermal");
        return to_string(*p);
    }
    if (key == "exclusion_window" || key == "approximation") return parse_flag(key, v) ? "on" : "off";
    if (key == "grid") {
        if (v != "log" && v != "linear") throw DomainError("config key 'grid': expected log or linear");
        return v;
    }
    if (key == "material_A" || key == "material_B") {
        if (!builtin_material(v)) throw DomainError("config key '" + key + "': unknown material '" + v + "'");
        return v;
    }
    if (key == "preset") {
        if (v != "table1" && v != "none") throw DomainError("config key 'preset': expected table1 or none");
        return v;
    }
    if (key == "seed") {
        if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
            throw DomainError("config key 'seed': expected a non-negative integer");
        return v;
    }
    if (key == "n_points") {
        const double n = parse_number(key, v);
        if (n < 2 || n != std::floor(n)) throw DomainError("config key 'n_points': expected an integer >= 2");
        return v;
    }
    parse_number(key, v);
    return v;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k = kPhysical;
        for (const auto& [name, _] : optional_defaults()) k.push_back(name);
        std::sort(k.begin(), k.end());
        return k;
    }();
    return keys;
}

const std::string& RunConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw DomainError("config key '" + key + "' is missing");
    return it->second;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (std::find(config_keys().begin(), config_keys().end(), key) == config_keys().end())
        throw DomainError("unknown config key '" + key + "'; valid keys: " + join_keys());
    values_[key] = canonical(key, trim(value));
}

SystemParams RunConfig::params() const {
    auto num = [this](const std::string& k) { return parse_number(k, get(k)); };
    SystemParams p;
    p.M = num("M");
    p.omega_m = constants::two_pi * num("omega_m_hz");
    p.Q_m = num("Q_m");
    p.omega_snA = constants::two_pi * num("omega_snA_hz");
    p.omega_snB = constants::two_pi * num("omega_snB_hz");
    p.Lambda = constants::two_pi * num("Lambda_hz");
    p.theta_plus = num("theta_plus");
    p.theta_minus = num("theta_minus");
    p.squeeze = {num("squeeze_r"), num("squeeze_phi")};
    p.temperature = num("temperature");
    p.prescription = *prescription_from_string(get("prescription"));
    p.laser_force_psd = num("laser_force_psd");
    return p;
}

GridControls RunConfig::grid() const {
    GridControls g;
    g.f_min_hz = parse_number("f_min_hz", get("f_min_hz"));
    g.f_max_hz = parse_number("f_max_hz", get("f_max_hz"));
    g.n_points = static_cast<std::size_t>(parse_number("n_points", get("n_points")));
    g.log = get("grid") == "log";
    if (!(g.f_max_hz > g.f_min_hz) || (g.log && !(g.f_min_hz > 0.0)))
        throw DomainError("grid controls: need f_max_hz > f_min_hz (and f_min_hz > 0 for a log grid)");
    return g;
}

std::uint64_t RunConfig::seed() const { return std::stoull(get("seed")); }
bool RunConfig::exclusion_window() const { return get("exclusion_window") == "on"; }
bool RunConfig::approximation() const { return get("approximation") == "on"; }
MirrorMaterial RunConfig::material_A() const { return *builtin_material(get("material_A")); }
MirrorMaterial RunConfig::material_B() const { return *builtin_material(get("material_B")); }

std::string RunConfig::serialize(const std::string& line_prefix) const {
    std::string out;
    for (const auto& [k, v] : values_) out += line_prefix + k + " = " + v + "\n";
    return out;
}

RunConfig parse_config(const std::string& text, const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::map<std::string, std::string> given;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DomainError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (std::find(config_keys().begin(), config_keys().end(), key) == config_keys().end())
            throw DomainError("config line " + std::to_string(lineno) + ": unknown key '" + key +
                              "'; valid keys: " + join_keys());
        if (!given.emplace(key, value).second)
            throw DomainError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    for (const auto& [k, v] : overrides) {
        if (std::find(config_keys().begin(), config_keys().end(), k) == config_keys().end())
            throw DomainError("unknown config key '" + k + "'; valid keys: " + join_keys());
        given[k] = v;
    }
    RunConfig cfg;
    for (const auto& [k, v] : optional_defaults()) cfg.values_[k] = v;
    if (const auto it = given.find("preset"); it != given.end() && canonical("preset", it->second) == "table1")
        for (const auto& [k, v] : table1_values()) cfg.values_[k] = v;
    for (const auto& [k, v] : given) cfg.set(k, v);
    for (const auto& k : kPhysical)
        if (!cfg.values_.count(k)) throw DomainError("config is missing required key '" + k + "'");
    return cfg;
}

std::string read_config_text(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DomainError("cannot read config file '" + path + "'");
    std::string line, plain, embedded;
    bool has_embedded = false;
    while (std::getline(f, line)) {
        if (line.rfind("#cfg ", 0) == 0) {
            has_embedded = true;
            embedded += line.substr(5) + "\n";
        }
        plain += line + "\n";
    }
    return has_embedded ? embedded : plain;
}

RunConfig load_config(const std::string& path) { return parse_config(read_config_text(path)); }

}  // namespace sngrav
