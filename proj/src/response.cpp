#include "sngrav/response.hpp"

#include <cmath>

#include "sngrav/constants.hpp"
#include "sngrav/errors.hpp"

namespace sngrav {

cd mech_denominator(const SystemParams& p, cd w, double omega_shift2) {
    return p.omega_m * p.omega_m + omega_shift2 - w * w - cd(0.0, p.gamma_m()) * w;
}

Susceptibilities susceptibilities(const SystemParams& p, const FrequencyGrid& grid) {
    Susceptibilities s;
    s.grid = grid;
    const double wa2 = p.omega_snA * p.omega_snA, wb2 = p.omega_snB * p.omega_snB, wq2 = p.omega_sn2_mean();
    for (double w : grid.values) {
        s.chi_m.push_back(1.0 / (p.M * mech_denominator(p, w)));
        s.chi_A.push_back(1.0 / (p.M * mech_denominator(p, w, wa2)));
        s.chi_B.push_back(1.0 / (p.M * mech_denominator(p, w, wb2)));
        s.chi_q.push_back(1.0 / (p.M * mech_denominator(p, w, wq2)));
    }
    return s;
}

SqueezeFactors squeeze_factors(const SqueezedInput& sq, double theta) {
    if (sq.r < 0.0) throw DomainError("squeeze factor must be non-negative");
    const double ch = std::cosh(2 * sq.r), sh = std::sinh(2 * sq.r);
    SqueezeFactors f;
    f.xi = ch + std::cos(2 * (theta - sq.phi)) * sh;
    f.zeta = ch + std::cos(2 * sq.phi) * sh;
    f.zeta_tilde = ch * std::sin(2 * theta) + 2 * std::cos(theta - 2 * sq.phi) * std::sin(theta) * sh;
    return f;
}

double xi_half_normalized(const SqueezedInput& sq, double theta) {
    return 0.5 * (std::cosh(2 * sq.r) + std::cos(2 * theta) * std::sinh(2 * sq.r));
}

InputCovariance input_covariance(const SqueezedInput& sq) {
    const double ch = std::cosh(2 * sq.r), sh = std::sinh(2 * sq.r);
    return {ch + std::cos(2 * sq.phi) * sh, ch - std::cos(2 * sq.phi) * sh, std::sin(2 * sq.phi) * sh};
}

double quantum_white_force_psd(const SystemParams& p) {
    return p.prescription == Prescription::QuantumThermal ? p.thermal_force_psd() : 0.0;
}

FilterPoles filter_poles(const SystemParams& p, Arm arm, double theta, double extra_white) {
    if (std::sin(theta) == 0.0) throw DomainError("filter poles need sin(theta) != 0");
    const auto f = squeeze_factors(p.squeeze, theta);
    const double wq2 = p.omega_q2(arm), L2 = p.Lambda * p.Lambda, g = p.gamma_m(), st = std::sin(theta);
    // Spectral numerator / xi = w^4 + (b/a) w^2 + c/a as a polynomial in w^2.
    const double a = f.xi;
    const double b = f.xi * (g * g - 2 * wq2) - f.zeta_tilde * L2;
    const double c = f.xi * wq2 * wq2 + f.zeta_tilde * L2 * wq2 + st * st * L2 * L2 * f.zeta + st * st * L2 * extra_white;
    const cd disc = std::sqrt(cd(b * b - 4 * a * c));
    const cd z1 = (-b + disc) / (2 * a), z2 = (-b - disc) / (2 * a);
    std::vector<cd> lower;
    for (cd z : {z1, z2}) {
        const cd s = std::sqrt(z);
        for (cd w : {s, -s}) {
            if (w.imag() < 0.0) lower.push_back(w);
        }
    }
    if (lower.size() != 2) throw DomainError("filter poles: spectral numerator has zeros on the real axis");
    FilterPoles out;
    const bool first = lower[0].real() >= lower[1].real();
    out.beta = first ? lower[0] : lower[1];
    out.partner = first ? lower[1] : lower[0];
    out.modulus_sq = std::sqrt(c / a);
    return out;
}

cd beta_exact(const SystemParams& p, Arm arm) {
    return filter_poles(p, arm, p.theta(), quantum_white_force_psd(p)).beta;
}

cd beta_squared_approx(const SystemParams& p, Arm arm, double theta) {
    const cd denom = 1.0 / std::tan(theta) - cd(0.0, 1.0) * std::exp(-2 * p.squeeze.r);
    return p.omega_q2(arm) + p.Lambda * p.Lambda / denom;
}

double f_factor(const SystemParams& p, Arm arm, double w) {
    const cd beta = beta_exact(p, arm);
    const double ws2 = p.omega_sn(arm) * p.omega_sn(arm), b2 = std::norm(beta);
    return ws2 * ws2 + 2 * (w * w - b2) * ws2 + std::norm(w * w - beta * beta);
}

double f_factor_product(const SystemParams& p, Arm arm, double w) {
    const cd beta = beta_exact(p, arm), bc = std::conj(beta);
    const double ws2 = p.omega_sn(arm) * p.omega_sn(arm);
    const cd prod = (w - beta) * (w + bc) * (w + beta) * (w - bc);
    return prod.real() + 2 * (w * w - std::norm(beta)) * ws2 + ws2 * ws2;
}

double f_factor(const FilterPoles& poles, double omega_sn2, double w) {
    return std::norm(poles.P(w) + omega_sn2);
}

}  // namespace sngrav
