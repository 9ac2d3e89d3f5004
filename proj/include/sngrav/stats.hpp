#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sngrav/params.hpp"
#include "sngrav/spectra.hpp"

// Aggregated-measurement statistics. Force-referred spectra S^F = |D_m|^2 S are used throughout, so
// the indicator of one frequency bin of width 1/T has mean T S^F_{+-} and variance T^2 S^F_{++} S^F_{--}.
namespace sngrav {

struct MeasurementPlan {
    double bandwidth_gamma = 0.0;  // rad/s
    double duration_T = 0.0;       // s
    double bins_N = 0.0;           // Gamma T / 2pi
    double snr = 1.0;
    Prescription prescription = Prescription::ClassicalThermal;
    std::optional<std::pair<double, double>> exclusion_window;  // rad/s
    double kappa = 0.0;            // common-mode laser noise ratio at Gamma (plus any explicit kappa)
    double duration_approx = 0.0;  // compact small-angle estimate, reported alongside
    double duration_spectral = 0.0;  // band-averaged exact spectra
    bool unbounded = false;        // no SN signal (delta omega^2 = 0 or zero mean)
};

// Exclusion band [omega_m/2, 3 omega_m/2].
std::pair<double, double> exclusion_window(const SystemParams& p);

// Mean of the bin indicator, frequency independent in the small-angle limit:
// T dw^2 Lambda^2 zeta (sin theta - |sin theta|), with the quantum-thermal enhancement when selected.
double indicator_mean(const SystemParams& p, double duration_T);
// Exact per-bin mean T Re S^F_{+-}(w) from the assembled spectra.
double indicator_mean_spectral(const SystemParams& p, double duration_T, double omega);

// Per-bin variance T^2 (1 + kappa) S^F_{++}(w) S^F_{--}(w); kappa is an explicit extra common-mode factor
// on top of any laser_force_psd already in the spectra.
double indicator_variance(const SystemParams& p, double duration_T, double omega, double kappa = 0.0);
// Flat-band value T^2 (1 + kappa) (sin^2 Lambda^4 zeta + 4 sin^2 Lambda^2 gamma k_B T / hbar)^2.
double indicator_variance_flat(const SystemParams& p, double duration_T, double kappa = 0.0);

// Frequency where the flat part of S^F_{++} S^F_{--} is ten times the rising part. Scans a log grid
// for the first crossing, then bisects to 1e-6 relative. DomainError if there is no crossing.
double observation_bandwidth(const SystemParams& p);

// Measurement time for the selected prescription. `gamma` overrides the bandwidth rule.
MeasurementPlan measurement_time(const SystemParams& p, double snr_target, std::optional<double> gamma = {},
                                 double kappa = 0.0, bool exclude_resonance = false);
double measurement_time_qrpn(const SystemParams& p, double snr, double gamma);
double measurement_time_classical(const SystemParams& p, double snr, double gamma, double kappa = 0.0);
double measurement_time_quantum(const SystemParams& p, double snr, double gamma, double kappa = 0.0);
// Compact approximation in terms of n_th and e^{2r}; carries 1/(2 Gamma) rather than 1/(4 Gamma).
double measurement_time_approx(const SystemParams& p, double snr, double gamma, double kappa = 0.0);
// (2pi / Gamma) SNR^2 <var> / <mean>^2 with both averaged over (0, Gamma] from the exact spectra.
double measurement_time_spectral(const SystemParams& p, double snr, double gamma, double kappa = 0.0);

struct BinStatistic {
    double omega = 0.0;  // rad/s
    std::complex<double> mean;
    double variance = 0.0;
};

struct DetectionStatistic {
    std::complex<double> chi_N_mean;
    double chi_N_var = 0.0;
    double snr = 0.0;  // |mean| / sqrt(var)
    std::size_t bins = 0;
};

// chi_N = (1/N) sum_j C_j over the bins that survive the plan's exclusion window.
DetectionStatistic empirical_statistic(const std::vector<BinStatistic>& bins, const MeasurementPlan& plan);
// Bins w_j = 2 pi j / T (j >= 1, w_j <= Gamma) filled from the exact spectra.
std::vector<BinStatistic> predicted_bins(const SystemParams& p, double duration_T, double gamma);

struct ToleranceReport {
    double d_eps_omega_m = 0.0, d_eps_Q = 0.0, d_eps_M = 0.0, d_eps_gamma = 0.0, delta_BS = 0.0;
};

// Thermal-noise-limited bounds with |sin theta| and |dw^2|; infinite at T = 0.
ToleranceReport imperfection_tolerances(const SystemParams& p);

// Differential mismatches between the arms (relative, leading order).
struct MismatchSet {
    double d_eps_omega_m = 0.0, d_eps_Q = 0.0, d_eps_M = 0.0, d_eps_gamma = 0.0, delta_BS = 0.0;
};

struct MismatchSpectrum {
    FrequencyGrid grid;
    std::vector<cd> test_mass, cavity, beam_splitter, total;
    std::vector<std::string> warnings;
};

// False-positive cross spectrum (measured units, like S_{+-}) from each mechanism and their sum.
// The beam-splitter term uses delta_BS (S_{++} + S_{--}) with the full diagonals.
MismatchSpectrum mismatch_cross_spectrum(const SystemParams& p, const MismatchSet& m, const FrequencyGrid& grid);

}  // namespace sngrav
