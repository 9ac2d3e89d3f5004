#include "sngrav/params.hpp"

#include <cmath>

#include "sngrav/constants.hpp"
#include "sngrav/errors.hpp"

namespace sngrav {

namespace k = constants;

double SystemParams::thermal_force_psd() const {
    return 4.0 * gamma_m() * k::k_B * temperature / k::hbar;
}

std::vector<std::string> validate(const SystemParams& p) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be positive and finite");
    };
    positive(p.M, "M");
    positive(p.omega_m, "omega_m");
    positive(p.Q_m, "Q_m");
    positive(p.Lambda, "Lambda");
    if (p.omega_snA < 0.0 || p.omega_snB < 0.0) throw DomainError("SN frequencies must be non-negative");
    for (double th : {p.theta_plus, p.theta_minus}) {
        if (!(std::abs(th) < k::pi / 2)) throw DomainError("homodyne angles must satisfy |theta| < pi/2");
        if (th == 0.0) throw DomainError("homodyne angle 0 carries no displacement information");
    }
    if (p.squeeze.r < 0.0) throw DomainError("squeeze factor r must be non-negative");
    if (p.temperature < 0.0) throw DomainError("temperature must be non-negative");
    if (p.laser_force_psd < 0.0) throw DomainError("laser_force_psd must be non-negative");
    std::vector<std::string> warnings;
    if (p.omega_snA == p.omega_snB)
        warnings.emplace_back("omega_snA == omega_snB: the cross spectrum vanishes identically");
    return warnings;
}

void validate(const MirrorMaterial& m) {
    if (!(m.ion_mass > 0.0) || !(m.x_int > 0.0))
        throw DomainError("material '" + m.name + "' needs positive ion_mass and x_int");
}

void validate(const OpticalParams& o) {
    if (!(o.wavelength > 0.0) || !(o.intracavity_power > 0.0) || !(o.input_transmissivity > 0.0))
        throw DomainError("optical parameters must be strictly positive");
    if (o.input_transmissivity > 1.0) throw DomainError("input transmissivity must not exceed 1");
    if (o.cavity_bandwidth && !(*o.cavity_bandwidth > 0.0)) throw DomainError("cavity bandwidth must be positive");
}

double sn_frequency(const MirrorMaterial& material) {
    validate(material);
    const double x3 = material.x_int * material.x_int * material.x_int;
    return std::sqrt(k::G * material.ion_mass / (6.0 * std::sqrt(k::pi) * x3));
}

double cooperativity(const OpticalParams& optics, double M) {
    validate(optics);
    if (!(M > 0.0)) throw DomainError("mass must be positive");
    const double omega_c = k::two_pi * k::c / optics.wavelength;
    return std::sqrt(8.0 * omega_c * optics.intracavity_power / (M * optics.input_transmissivity * k::c * k::c));
}

double cooperativity_from_coupling(double g, double gamma, double M) {
    if (!(gamma > 0.0) || !(M > 0.0)) throw DomainError("gamma and M must be positive");
    return std::sqrt(2.0 * k::hbar * g * g / (M * gamma));
}

double coupling_rate(const OpticalParams& optics, double cavity_length) {
    validate(optics);
    if (!(cavity_length > 0.0)) throw DomainError("cavity length must be positive");
    const double omega_c = k::two_pi * k::c / optics.wavelength;
    return std::sqrt(omega_c * optics.intracavity_power / (k::hbar * k::c * cavity_length));
}

double cavity_bandwidth_from_length(double input_transmissivity, double cavity_length) {
    if (!(cavity_length > 0.0) || !(input_transmissivity > 0.0)) throw DomainError("need positive T_in and length");
    return k::c * input_transmissivity / (4.0 * cavity_length);
}

double thermal_occupation(const SystemParams& p) {
    if (p.temperature < 0.0) throw DomainError("temperature must be non-negative");
    return k::k_B * p.temperature / (k::hbar * p.omega_m * p.Q_m);
}

MirrorMaterial silicon() { return {"silicon", 28.0855 * k::atomic_mass_unit, 4.92e-12}; }
MirrorMaterial osmium() { return {"osmium", 190.23 * k::atomic_mass_unit, 2.023e-12}; }

std::optional<MirrorMaterial> builtin_material(const std::string& name) {
    if (name == "silicon" || name == "Si") return silicon();
    if (name == "osmium" || name == "Os") return osmium();
    return std::nullopt;
}

OpticalParams table1_optics() { return {1064e-9, 4.0, 0.01, std::nullopt}; }

SystemParams table1() {
    SystemParams p;
    p.M = 1.0;
    p.omega_m = k::two_pi * 6e-3;
    p.Q_m = 1e7;
    p.omega_snA = k::two_pi * 7.8e-3;
    p.omega_snB = k::two_pi * 77e-3;
    p.Lambda = k::two_pi * 1.0;
    p.theta_plus = p.theta_minus = -0.14;
    p.squeeze = {0.5 * std::log(10.0), 0.0};
    p.temperature = 1.0;
    p.prescription = Prescription::ClassicalThermal;
    return p;
}

const char* to_string(Prescription p) {
    switch (p) {
        case Prescription::QrpnOnly: return "qrpn_only";
        case Prescription::ClassicalThermal: return "classical_thermal";
        case Prescription::QuantumThermal: return "quantum_thermal";
    }
    return "?";
}

std::optional<Prescription> prescription_from_string(const std::string& s) {
    if (s == "qrpn_only" || s == "QRPN_ONLY") return Prescription::QrpnOnly;
    if (s == "classical_thermal" || s == "CLASSICAL_THERMAL") return Prescription::ClassicalThermal;
    if (s == "quantum_thermal" || s == "QUANTUM_THERMAL") return Prescription::QuantumThermal;
    return std::nullopt;
}

}  // namespace sngrav
