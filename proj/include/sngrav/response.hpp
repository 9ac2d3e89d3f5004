#pragma once

#include <complex>
#include <vector>

#include "sngrav/fourier.hpp"
#include "sngrav/params.hpp"

namespace sngrav {

// omega_m^2 + omega_shift2 - w^2 - i gamma_m w, i.e. 1/(M chi) for the oscillator whose squared
// frequency is raised by omega_shift2. Analytic in w; zeros sit just below the real axis.
cd mech_denominator(const SystemParams& p, cd w, double omega_shift2 = 0.0);

struct Susceptibilities {
    FrequencyGrid grid;
    std::vector<cd> chi_m, chi_A, chi_B, chi_q;  // 1/(kg (rad/s)^2)
};

Susceptibilities susceptibilities(const SystemParams& p, const FrequencyGrid& grid);

struct SqueezeFactors {
    double xi = 1.0;          // cosh2r + cos2(theta - phi) sinh2r, the measured-quadrature noise
    double zeta = 1.0;        // cosh2r + cos2phi sinh2r, the amplitude-quadrature noise
    double zeta_tilde = 0.0;  // cosh2r sin2theta + 2 cos(theta - 2phi) sin(theta) sinh2r
};

SqueezeFactors squeeze_factors(const SqueezedInput& sq, double theta);
// The alternative normalization (cosh2r + cos2theta sinh2r)/2, kept for comparison only.
double xi_half_normalized(const SqueezedInput& sq, double theta);

// Covariance of the input amplitude/phase quadratures (a1, a2) in units where vacuum is 1:
// [[zeta, cross], [cross, eta]].
struct InputCovariance {
    double zeta = 1.0, eta = 1.0, cross = 0.0;
};
InputCovariance input_covariance(const SqueezedInput& sq);

// Poles of the conditional dynamics for one arm. The measured-quadrature spectrum of that arm
// is xi |P(w)|^2 / |D_I(w)|^2 with P(w) = (w - beta)(w - partner); both roots lie strictly in the
// lower half-plane, and partner = -conj(beta) whenever beta^2 is not real.
struct FilterPoles {
    cd beta;
    cd partner;
    double modulus_sq = 0.0;  // |beta|^2 from the closed form sqrt(c/a)
    cd P(cd w) const { return (w - beta) * (w - partner); }
};

// White force PSD (dimensionless, x~ units) that enters the measured spectrum of a single arm:
// the thermal force under the quantum prescription, zero otherwise.
double quantum_white_force_psd(const SystemParams& p);

// Exact poles from the quadratic in w^2 satisfied by the spectral numerator. Branch: the two
// lower half-plane roots, beta being the one with Re >= 0. extra_white adds a white force PSD
// (x~ units) to the arm; pass quantum_white_force_psd(p) for the quantum prescription.
FilterPoles filter_poles(const SystemParams& p, Arm arm, double theta, double extra_white = 0.0);
cd beta_exact(const SystemParams& p, Arm arm);

// beta^2 ~ omega_q^2 + Lambda^2 / (cot theta - i e^{-2r}); returns beta^2. Note that it lands in
// the upper half-plane branch, i.e. it approximates conj(beta_exact^2).
cd beta_squared_approx(const SystemParams& p, Arm arm, double theta);

// omega_sn^4 + 2(w^2 - |beta|^2) omega_sn^2 + |w^2 - beta^2|^2.
double f_factor(const SystemParams& p, Arm arm, double w);
// Same quantity via the factored form (w-beta)(w+conj beta)(w+beta)(w-conj beta) + ...
double f_factor_product(const SystemParams& p, Arm arm, double w);
// |P(w) + omega_sn^2|^2 with explicit poles; equals the two forms above on the real axis.
double f_factor(const FilterPoles& poles, double omega_sn2, double w);

}  // namespace sngrav
