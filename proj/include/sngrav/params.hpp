#pragma once

#include <optional>
#include <string>
#include <vector>

namespace sngrav {

struct MirrorMaterial {
    std::string name;
    double ion_mass = 0.0;  // kg
    double x_int = 0.0;     // m, zero-point spread of the lattice ions
};

struct OpticalParams {
    double wavelength = 0.0;            // m
    double intracavity_power = 0.0;     // W
    double input_transmissivity = 0.0;  // power transmissivity of the input mirror, in (0, 1]
    std::optional<double> cavity_bandwidth;  // rad/s, amplitude decay rate
};

struct SqueezedInput {
    double r = 0.0;    // squeeze factor, e^{2r} is the power squeezing ratio
    double phi = 0.0;  // squeezing angle; 0 is phase squeezing
};

enum class Prescription { QrpnOnly, ClassicalThermal, QuantumThermal };
enum class Arm { A, B };

struct SystemParams {
    double M = 1.0;            // kg
    double omega_m = 0.0;      // rad/s
    double Q_m = 1.0;
    double omega_snA = 0.0;    // rad/s
    double omega_snB = 0.0;    // rad/s
    double Lambda = 0.0;       // rad/s
    double theta_plus = 0.0;   // rad
    double theta_minus = 0.0;  // rad
    SqueezedInput squeeze;
    double temperature = 0.0;  // K
    Prescription prescription = Prescription::ClassicalThermal;
    double laser_force_psd = 0.0;  // N^2/Hz, flat, common channel only

    double gamma_m() const { return omega_m / Q_m; }
    double omega_sn(Arm arm) const { return arm == Arm::A ? omega_snA : omega_snB; }
    // Mean of the squared SN frequencies; the diagonal of the SN coupling matrix.
    double omega_sn2_mean() const { return 0.5 * (omega_snA * omega_snA + omega_snB * omega_snB); }
    // omega_snA^2 - omega_snB^2; twice the off-diagonal of the SN coupling matrix.
    double delta_omega2() const { return omega_snA * omega_snA - omega_snB * omega_snB; }
    double omega_q2(Arm arm) const { return omega_m * omega_m + omega_sn(arm) * omega_sn(arm); }
    bool equal_angles() const { return theta_plus == theta_minus; }
    // Common homodyne angle; only meaningful when equal_angles() holds.
    double theta() const { return theta_plus; }
    // Dimensionless thermal force PSD, 4 gamma_m k_B T / hbar, in units where x~ = sqrt(M/hbar) x.
    double thermal_force_psd() const;
};

// Throws DomainError on violated invariants. Returns advisory warnings (e.g. equal SN frequencies).
std::vector<std::string> validate(const SystemParams& p);
void validate(const MirrorMaterial& m);
void validate(const OpticalParams& o);

// sqrt(G m / (6 sqrt(pi) x_int^3)).
double sn_frequency(const MirrorMaterial& material);

// Power form sqrt(8 omega_c P_cav / (M T_in c^2)).
double cooperativity(const OpticalParams& optics, double M);
// Coupling form sqrt(2 hbar g^2 / (M gamma)).
double cooperativity_from_coupling(double g, double gamma, double M);
// Single-photon-amplified coupling sqrt(omega_c P_cav / (hbar c L)) for a cavity of length L.
double coupling_rate(const OpticalParams& optics, double cavity_length);
// Amplitude decay rate c T_in / (4 L) of a single-port cavity of length L.
double cavity_bandwidth_from_length(double input_transmissivity, double cavity_length);

// k_B T / (hbar omega_m Q_m).
double thermal_occupation(const SystemParams& p);

MirrorMaterial silicon();
MirrorMaterial osmium();
std::optional<MirrorMaterial> builtin_material(const std::string& name);

OpticalParams table1_optics();
// Reference operating point: the tabulated mechanical and SN values, 10 dB phase
// squeezing, theta = -0.14 rad on both ports, T = 1 K, and Lambda/2pi = 1 Hz as used for
// the plotted spectra. The cooperativity implied by table1_optics() is larger (about 1.26 Hz).
SystemParams table1();

const char* to_string(Prescription p);
std::optional<Prescription> prescription_from_string(const std::string& s);

}  // namespace sngrav
