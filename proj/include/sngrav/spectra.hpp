#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sngrav/fourier.hpp"
#include "sngrav/params.hpp"
#include "sngrav/wiener.hpp"

// Spectral normalization: one-sided power per Hz of the measured quadratures, in units where an
// unsqueezed vacuum input gives 1. Variances follow as \int_0^inf S df = (1/4pi) \int S dw.
namespace sngrav {

struct SpectralMatrix {
    FrequencyGrid grid;
    std::vector<cd> Spp, Smm, Spm, Smp;  // S_{y+ y+}, S_{y- y-}, S_{y+ y-}, S_{y- y+}
    Prescription prescription = Prescription::ClassicalThermal;
    // Laser-noise share of the common channel relative to S_{y- y-}, per frequency.
    std::vector<double> kappa;
};

// Closed form for equal angles; unequal angles solve the Wiener filter and assemble
// (I + G) S_yq (I + G)^dagger. Throws DomainError for an inconsistent prescription setup.
SpectralMatrix output_spectra(const SystemParams& p, const FrequencyGrid& grid);
// Unequal-angle assembly with a filter computed by the caller (reused across calls).
SpectralMatrix output_spectra(const SystemParams& p, const FrequencyGrid& grid, const FilterMatrix& filter);

// |D_m(w)|^2 S: spectra referred to the (dimensionless) force on the mirrors.
SpectralMatrix force_referred(const SystemParams& p, const SpectralMatrix& s);

// sqrt(|S+- S-+| / (S++ S--)) per grid point; DomainError if a diagonal vanishes.
std::vector<double> normalized_correlation(const SpectralMatrix& s);

// Measurement-dominated small-angle approximations, kept separate from the exact assembly.
// Cross spectrum 2 dw^2 Lambda^2 zeta sin(theta) / |D_m|^2 and diagonal sin^2(theta) Lambda^4 zeta / |D_m|^2.
cd cross_spectrum_small_theta(const SystemParams& p, double w);
double diagonal_spectrum_small_theta(const SystemParams& p, double w);

struct CorrelationMap {
    std::vector<double> theta_plus, theta_minus;
    std::vector<std::vector<double>> epsilon;  // [i_plus][i_minus] at w = omega_m; NaN on failure
    std::vector<std::string> failures;         // one message per failed cell
};

// epsilon(omega_m) over the Cartesian product of the two angle lists, every cell through the
// numerical filter. A cell whose solve fails is recorded, not fatal.
CorrelationMap correlation_map(const SystemParams& p, const std::vector<double>& theta_plus,
                               const std::vector<double>& theta_minus);

struct ConditionalState {
    double Vxx_A = 0.0, Vxx_B = 0.0, Vx_AB = 0.0;  // m^2
    double validity_ratio_A = 0.0, validity_ratio_B = 0.0;  // sqrt(V) / x_int
    bool flagged = false;  // some ratio exceeds 0.1
};

// General matrix route: integrates the filtered error spectrum T Sigma T^dagger numerically.
ConditionalState conditional_covariance(const SystemParams& p, const MirrorMaterial& mirror_A = silicon(),
                                        const MirrorMaterial& mirror_B = osmium());
// Per-mirror route for equal angles: exact residue integral of the single-arm error spectrum.
ConditionalState conditional_covariance_reduced(const SystemParams& p, const MirrorMaterial& mirror_A = silicon(),
                                                const MirrorMaterial& mirror_B = osmium());

}  // namespace sngrav
